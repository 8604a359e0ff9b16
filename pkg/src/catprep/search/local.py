"""Randomized local repair of an ancilla permutation for fixed controls.

Start from a random permutation. While some table entry is violated, pick
one and swap a position inside its projected support with one outside until
that entry is repaired. An inner loop that runs past ``4 * w'`` swaps is
abandoned for a fresh random permutation, which costs one outer iteration.
"""

from __future__ import annotations

import time
from collections.abc import Sequence

import numpy as np

from .. import bits
from ..circuits import PrepCircuit
from ..faults import FaultTables
from .common import SearchResult, Status, TableCache


def default_iterations(w_prime: int, t: int) -> int:
    return 10 * w_prime * t


def repair(tables: FaultTables, n_iter: int | None = None, seed: int = 0) -> SearchResult:
    n = tables.w_prime
    n_iter = default_iterations(n, tables.t) if n_iter is None else n_iter
    if n_iter < 1:
        raise ValueError("N_iter must be at least 1")
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    stats = {"iterations": 0, "swaps": 0, "restarts": 0, "seed": seed}

    def done(status: Status, sigma=None) -> SearchResult:
        stats["seconds"] = round(time.perf_counter() - start, 6)
        return SearchResult(status, "local", list(tables.controls), sigma, stats)

    sigma = rng.permutation(n).tolist()
    inner_cap = 4 * n
    for _ in range(n_iter):
        hit = np.flatnonzero(tables.violated(sigma))
        if len(hit) == 0:
            return done(Status.SAT, sigma)
        stats["iterations"] += 1
        i = int(hit[rng.integers(len(hit))])
        ones = bits.support(int(tables.proj[i]))
        zeros = [j for j in range(n) if j not in set(ones)]
        if not ones or not zeros:
            # trivial projection: no permutation can repair this entry
            return done(Status.FAIL)
        swaps = 0
        while tables.entry_violated(i, sigma):
            if swaps >= inner_cap:
                sigma = rng.permutation(n).tolist()
                stats["restarts"] += 1
                break
            a = ones[rng.integers(len(ones))]
            b = zeros[rng.integers(len(zeros))]
            sigma[a], sigma[b] = sigma[b], sigma[a]
            swaps += 1
        stats["swaps"] += swaps
    if not tables.violated(sigma).any():
        return done(Status.SAT, sigma)
    return done(Status.FAIL)


def local_search(
    data: PrepCircuit,
    ancilla: PrepCircuit,
    controls: Sequence[int],
    t: int,
    N_iter: int | None = None,
    seed: int = 0,
    *,
    cache: TableCache | None = None,
) -> SearchResult:
    """Incomplete search; FAIL means the iteration budget ran out, not UNSAT."""
    cache = cache or TableCache(data, ancilla, t)
    return repair(cache.tables(controls), N_iter, seed)
