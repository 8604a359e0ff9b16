"""Complete permutation search for a fixed control set, compiled to CNF.

Boolean ``x[i][j]`` says control ``i`` (position in the sorted control list)
targets ancilla ``j``; rows and columns are exactly-one. A forbidden image
``g`` of a projection with support ``S`` is excluded by requiring some control
in ``S`` to land outside ``g``, which is exact because |sigma(S)| = |g|.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Sequence

import numpy as np
from pysat.card import CardEnc, EncType
from pysat.formula import IDPool
from pysat.solvers import Solver

from .. import bits
from ..circuits import PrepCircuit
from ..faults import FaultTables
from .common import SearchResult, Status, TableCache

logger = logging.getLogger(__name__)

DEFAULT_SOLVER = "cadical195"
DEFAULT_UPFRONT_CLAUSES = 200_000


class PermutationEncoding:
    """CNF over ``x[i][j]`` with incremental forbidden-image clauses."""

    def __init__(self, n: int, solver: str = DEFAULT_SOLVER) -> None:
        self.n = n
        self.pool = IDPool()
        self.x = [[self.pool.id(("x", i, j)) for j in range(n)] for i in range(n)]
        self.solver = Solver(name=solver)
        enc = EncType.pairwise if n <= 12 else EncType.seqcounter
        for i in range(n):
            self._card([self.x[i][j] for j in range(n)], enc)
            self._card([self.x[j][i] for j in range(n)], enc)
        self.added: set[tuple[int, int]] = set()

    def _card(self, lits: list[int], enc: int) -> None:
        cnf = CardEnc.equals(lits=lits, bound=1, vpool=self.pool, encoding=enc)
        self.solver.append_formula(cnf.clauses)

    def forbid(self, proj: int, image: int) -> bool:
        """Add ``sigma(proj) != image`` for an image of equal popcount; False if already present."""
        key = (proj, image)
        if key in self.added:
            return False
        self.added.add(key)
        ones = bits.support(proj)
        outside = [j for j in range(self.n) if not (image >> j) & 1]
        self.solver.add_clause([self.x[i][j] for i in ones for j in outside])
        return True

    def solve(self, conflicts: int | None) -> bool | None:
        if conflicts is None:
            return self.solver.solve()
        self.solver.conf_budget(conflicts)
        return self.solver.solve_limited()

    def sigma(self) -> list[int]:
        model = self.solver.get_model()
        pos = {v for v in model if v > 0}
        return [next(j for j in range(self.n) if self.x[i][j] in pos) for i in range(self.n)]

    def close(self) -> None:
        self.solver.delete()


def _trivially_unsat(tables: FaultTables) -> bool:
    triv = tables.sigma_independent
    if not triv.any():
        return False
    return bool(tables.violated(list(range(tables.w_prime)))[triv].any())


def solve_with_tables(
    tables: FaultTables,
    *,
    conflicts: int | None = None,
    upfront_clauses: int = DEFAULT_UPFRONT_CLAUSES,
    max_rounds: int | None = None,
    solver: str = DEFAULT_SOLVER,
) -> SearchResult:
    """Decide the fixed-control instance described by ``tables``.

    ``conflicts`` bounds each solver call; exhausting it (or ``max_rounds`` lazy
    refinements) yields TIMEOUT, never UNSAT.
    """
    n = tables.w_prime
    start = time.perf_counter()
    stats = {"clauses": 0, "rounds": 0, "entries": len(tables)}
    identity = list(range(n))

    def done(status: Status, sigma=None) -> SearchResult:
        stats["seconds"] = round(time.perf_counter() - start, 6)
        return SearchResult(status, "fixed", list(tables.controls), sigma, stats)

    if not tables.violated(identity).any():
        return done(Status.SAT, identity)
    if _trivially_unsat(tables):
        return done(Status.UNSAT)

    enc = PermutationEncoding(n, solver)
    try:
        nontriv = np.flatnonzero(~tables.sigma_independent)
        sizes = [len(tables.forbidden_images(int(i))) for i in nontriv]
        upfront = sum(sizes) <= upfront_clauses
        stats["mode"] = "upfront" if upfront else "lazy"
        if upfront:
            for i in nontriv:
                p = int(tables.proj[i])
                for g in tables.forbidden_images(int(i)).tolist():
                    stats["clauses"] += enc.forbid(p, int(g))
        while True:
            res = enc.solve(conflicts)
            if res is None:
                return done(Status.TIMEOUT)
            if not res:
                return done(Status.UNSAT)
            sigma = enc.sigma()
            hit = np.flatnonzero(tables.violated(sigma))
            if len(hit) == 0:
                return done(Status.SAT, sigma)
            if upfront:
                raise AssertionError("model violates an upfront-encoded constraint")
            stats["rounds"] += 1
            if max_rounds is not None and stats["rounds"] > max_rounds:
                return done(Status.TIMEOUT)
            images = tables.images(sigma)[hit]
            full = bits.full_mask(n)
            for i, img in zip(hit.tolist(), images.tolist()):
                p = int(tables.proj[i])
                stats["clauses"] += enc.forbid(p, int(img))
                if 2 * bits.popcount(p) == n:
                    stats["clauses"] += enc.forbid(p, int(img) ^ full)
    finally:
        enc.close()


def solve_fixed_controls(
    data: PrepCircuit,
    ancilla: PrepCircuit,
    controls: Sequence[int],
    t: int,
    budget: int | None = None,
    *,
    cache: TableCache | None = None,
    **kwargs,
) -> SearchResult:
    """Complete search over ancilla permutations for the given (sorted) controls.

    ``budget`` is a per-call conflict limit; see :func:`solve_with_tables`.
    """
    cache = cache or TableCache(data, ancilla, t)
    tables = cache.tables(controls)
    return solve_with_tables(tables, conflicts=budget, **kwargs)
