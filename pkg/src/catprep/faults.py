"""Propagated X-fault sets of preparation circuits and the projected check tables.

Errors are integer bitmasks (bit ``i`` = qubit ``i``). A :class:`FaultSet` stores,
for every error reachable with at most ``order`` faults, the minimal number of
faults producing it; ``E_k`` is the subset with count <= k.
"""

from __future__ import annotations

import logging
import os
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import bits
from .circuits import PrepCircuit
from .errors import CircuitError, ResourceError

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**8
_DENSE_LIMIT = 24
_ABSENT = np.int16(10_000)


def default_budget() -> int:
    return int(os.environ.get("CATPREP_FAULT_BUDGET", DEFAULT_BUDGET))


@dataclass(frozen=True, eq=False)
class FaultSet:
    width: int
    order: int
    masks: np.ndarray  # sorted uint64
    faults: np.ndarray  # minimal fault count per mask

    def __len__(self) -> int:
        return len(self.masks)

    def __contains__(self, e: int) -> bool:
        return self.min_faults(e) <= self.order

    def elements(self, k: int | None = None) -> set[int]:
        """The literal set E_k (all errors from at most ``k`` faults, zero included)."""
        k = self.order if k is None else k
        if k > self.order:
            raise ValueError(f"fault set only enumerated up to order {self.order}")
        return {int(x) for x in self.masks[self.faults <= k]}

    def min_faults(self, e: int) -> int:
        i = int(np.searchsorted(self.masks, np.uint64(e)))
        if i < len(self.masks) and int(self.masks[i]) == e:
            return int(self.faults[i])
        return int(_ABSENT)

    @cached_property
    def _lookup(self) -> _DistanceLookup:
        return _DistanceLookup(self)

    def distances(self, masks: np.ndarray, *, modulo_stabilizer: bool = False) -> np.ndarray:
        """Minimal fault counts for an array of masks; absent masks map to a large sentinel.

        With ``modulo_stabilizer`` the complement of each mask is also accepted.
        """
        return self._lookup(np.asarray(masks, dtype=np.uint64), modulo_stabilizer)

    def hex_lines(self, k: int | None = None) -> list[str]:
        return [bits.to_hex(e, self.width) for e in sorted(self.elements(k))]


class _DistanceLookup:
    def __init__(self, fs: FaultSet) -> None:
        self.fs = fs
        self.full = np.uint64(bits.full_mask(fs.width))
        self.dense = None
        if fs.width <= _DENSE_LIMIT:
            d = np.full(1 << fs.width, _ABSENT, dtype=np.int16)
            d[fs.masks.astype(np.int64)] = fs.faults
            self.dense = d
            # x ^ full == full - x, so the complement table is the reversed array
            self.dense_mod = np.minimum(d, d[::-1])

    def _sparse(self, x: np.ndarray) -> np.ndarray:
        m = self.fs.masks
        i = np.searchsorted(m, x)
        i = np.minimum(i, len(m) - 1)
        hit = m[i] == x
        return np.where(hit, self.fs.faults[i].astype(np.int16), _ABSENT)

    def __call__(self, x: np.ndarray, modulo: bool) -> np.ndarray:
        if self.dense is not None:
            table = self.dense_mod if modulo else self.dense
            return table[x.astype(np.int64)]
        d = self._sparse(x)
        if modulo:
            d = np.minimum(d, self._sparse(x ^ self.full))
        return d


def single_fault_set(c: PrepCircuit) -> FaultSet:
    """E_1: end-of-circuit X patterns of one X fault at any location, plus zero.

    Locations are every |0> initialization and both outputs of every CNOT. An X
    on the |+> root before its first CNOT acts trivially and is not a location.
    """
    gates = c.cnots

    def propagate(e: int, start: int) -> int:
        for ctl, tgt in gates[start:]:
            if (e >> ctl) & 1:
                e ^= 1 << tgt
        return e

    out = {0}
    for q in range(c.width):
        if q != c.root:
            out.add(propagate(1 << q, 0))
    for i, (ctl, tgt) in enumerate(gates):
        out.add(propagate(1 << ctl, i + 1))
        out.add(propagate(1 << tgt, i + 1))
    masks = np.array(sorted(out), dtype=np.uint64)
    faults = (masks != 0).astype(np.int16)
    return FaultSet(c.width, 1, masks, faults)


def closure(width: int, generators: Sequence[int], order: int, budget: int | None = None) -> FaultSet:
    """All XOR sums of at most ``order`` generators, with minimal term counts."""
    if order < 0:
        raise ValueError("order must be non-negative")
    budget = default_budget() if budget is None else budget
    gens = np.unique(np.array([g for g in generators if g], dtype=np.uint64))
    visited = np.zeros(1, dtype=np.uint64)
    dist = np.zeros(1, dtype=np.int16)
    frontier = visited
    for k in range(1, order + 1):
        if len(frontier) == 0 or len(gens) == 0:
            break
        chunk = max(1, 2_000_000 // len(gens))
        parts = []
        for s in range(0, len(frontier), chunk):
            cand = (frontier[s : s + chunk, None] ^ gens[None, :]).ravel()
            parts.append(np.unique(cand))
        cand = np.unique(np.concatenate(parts))
        pos = np.minimum(np.searchsorted(visited, cand), len(visited) - 1)
        new = cand[visited[pos] != cand]
        size = len(visited) + len(new)
        if size > budget:
            raise ResourceError(
                f"fault set of order {k} on {width} qubits exceeds budget ({size} > {budget})",
                size=size,
                budget=budget,
            )
        merged = np.concatenate([visited, new])
        mdist = np.concatenate([dist, np.full(len(new), k, dtype=np.int16)])
        idx = np.argsort(merged, kind="stable")
        visited, dist = merged[idx], mdist[idx]
        frontier = new
        logger.debug("order %d: %d new errors, %d total", k, len(new), len(visited))
    return FaultSet(width, order, visited, dist)


def fault_set(c: PrepCircuit, t: int, budget: int | None = None) -> FaultSet:
    """E_t of a preparation circuit (every error from at most ``t`` faults)."""
    if t < 1:
        raise ValueError("fault order must be at least 1")
    e1 = single_fault_set(c)
    return closure(c.width, [int(x) for x in e1.masks], t, budget)


def project(e: int, controls: Sequence[int]) -> int:
    """Restriction of ``e`` to ``controls``: bit ``j`` of the result is bit ``controls[j]`` of ``e``."""
    out = 0
    for j, q in enumerate(controls):
        if q < 0:
            raise CircuitError(f"control index {q} out of range")
        out |= ((e >> q) & 1) << j
    return out


def fault_budget(t: int, k: int, w: int) -> int:
    """h_k(e) = min(t - k, wt(e) - k - 1): ancilla faults that may still cancel ``e``."""
    return min(t - k, w - k - 1)


def _check_controls(controls: Sequence[int], width: int) -> list[int]:
    controls = [int(q) for q in controls]
    if len(set(controls)) != len(controls):
        raise CircuitError("duplicate control index")
    for q in controls:
        if not 0 <= q < width:
            raise CircuitError(f"control index {q} out of range for width {width}")
    return controls


def _representatives(data: FaultSet, controls: list[int], k: int, t: int):
    """Max-weight pre-image per projection class of E_k; returns sorted arrays."""
    n_c = len(controls)
    full_c = np.uint64(bits.full_mask(n_c))
    sel = data.faults <= k
    m = data.masks[sel]
    p = bits.project_array(m, controls)
    cls = np.minimum(p, p ^ full_c)
    wt = bits.weight_array(m, data.width)
    lex = bits.lex_key_array(m, data.width)
    order = np.lexsort((np.iinfo(np.uint64).max - lex, -wt, cls))
    cls_sorted = cls[order]
    _, first = np.unique(cls_sorted, return_index=True)
    pick = order[first]
    reps, proj, wts = m[pick], p[pick], wt[pick]
    h = np.minimum(t - k, wts - k - 1)
    trivial = (proj == 0) | (proj == full_c)
    keep = (h >= 1) | ((h == 0) & trivial)
    return reps[keep], proj[keep], wts[keep], h[keep]


def representatives(data: FaultSet, controls: Sequence[int], k: int, t: int) -> dict[int, int]:
    """R_k restricted to representatives that can still witness a violation.

    Keys are projection classes (projection modulo complement), values the
    maximal-weight pre-image in E_k (ties: lexicographically largest bit list).
    Entries whose fault budget h_k is negative, or zero with a non-trivial
    projection, are dropped since no ancilla error can cancel them.
    """
    controls = _check_controls(controls, data.width)
    if k > data.order:
        raise ValueError(f"fault set only enumerated up to order {data.order}")
    reps, proj, _, _ = _representatives(data, controls, k, t)
    full_c = bits.full_mask(len(controls))
    return {min(int(p), int(p) ^ full_c): int(e) for e, p in zip(reps, proj)}


def bad_images(e: int, k: int, t: int, ancilla: FaultSet, controls: Sequence[int], data_width: int) -> set[int]:
    """Ancilla errors within the fault budget that could cancel the copy of ``e``.

    Members have popcount |pi(e)| or w' - |pi(e)|; the union runs over ancilla
    errors from 0..h_k(e) faults (the zero vector only matters for a trivial projection).
    """
    h = fault_budget(t, k, bits.weight(e, data_width))
    if h < 0:
        return set()
    if h > ancilla.order:
        raise ValueError(f"ancilla fault set only enumerated up to order {ancilla.order}, need {h}")
    m = bits.popcount(project(e, controls))
    n_a = ancilla.width
    sel = ancilla.masks[ancilla.faults <= h]
    pc = bits.popcount_array(sel)
    return {int(x) for x in sel[(pc == m) | (pc == n_a - m)]}


@dataclass(eq=False)
class FaultTables:
    """Per-control-set tables for the fast permutation check.

    ``proj``/``budget``/``rep``/``rep_order`` are aligned arrays with one entry per
    projection class: the copy ``sigma(proj)`` must not match an ancilla error
    (modulo complement) from at most ``budget`` faults.
    """

    controls: list[int]
    t: int
    data_width: int
    ancilla: FaultSet
    R: dict[int, dict[int, int]]
    proj: np.ndarray
    budget: np.ndarray
    rep: np.ndarray
    rep_order: np.ndarray
    rep_weight: np.ndarray
    _bad_cache: dict = field(default_factory=dict, repr=False)

    @property
    def w_prime(self) -> int:
        return len(self.controls)

    def __len__(self) -> int:
        return len(self.proj)

    def h(self, k: int, e: int) -> int:
        return fault_budget(self.t, k, bits.weight(e, self.data_width))

    def bad(self, e: int, k: int) -> set[int]:
        return bad_images(e, k, self.t, self.ancilla, self.controls, self.data_width)

    def images(self, sigma: Sequence[int]) -> np.ndarray:
        return bits.scatter_array(self.proj, sigma)

    def violated(self, sigma: Sequence[int]) -> np.ndarray:
        """Boolean mask over table entries whose image lands in the bad set."""
        d = self.ancilla.distances(self.images(sigma), modulo_stabilizer=True)
        return d <= self.budget

    def entry_violated(self, i: int, sigma: Sequence[int]) -> bool:
        img = 0
        p = int(self.proj[i])
        for j, s in enumerate(sigma):
            if (p >> j) & 1:
                img |= 1 << s
        full = bits.full_mask(self.w_prime)
        lim = int(self.budget[i])
        return min(self.ancilla.min_faults(img), self.ancilla.min_faults(img ^ full)) <= lim

    def forbidden_images(self, i: int) -> np.ndarray:
        """Images with the popcount of entry ``i`` that are forbidden (complements folded in)."""
        m = bits.popcount(int(self.proj[i]))
        key = (m, int(self.budget[i]))
        if key not in self._bad_cache:
            a = self.ancilla
            sel = a.masks[a.faults <= key[1]]
            pc = bits.popcount_array(sel)
            full = np.uint64(bits.full_mask(a.width))
            imgs = np.concatenate([sel[pc == m], sel[pc == a.width - m] ^ full])
            self._bad_cache[key] = np.unique(imgs)
        return self._bad_cache[key]

    @property
    def sigma_independent(self) -> np.ndarray:
        """Entries violated for every permutation (trivial projection)."""
        full = np.uint64(bits.full_mask(self.w_prime))
        return (self.proj == 0) | (self.proj == full)


def build_tables(data: FaultSet, ancilla: FaultSet, controls: Sequence[int], t: int) -> FaultTables:
    """Representatives R_k (k = 1..t) and their fault budgets for fixed ``controls``."""
    controls = _check_controls(controls, data.width)
    if len(controls) != ancilla.width:
        raise CircuitError(f"{len(controls)} controls for an ancilla of width {ancilla.width}")
    if data.order < t:
        raise ValueError(f"data fault set has order {data.order} < t={t}")
    if ancilla.order < t - 1:
        raise ValueError(f"ancilla fault set has order {ancilla.order} < t-1={t - 1}")
    n_c = len(controls)
    full_c = bits.full_mask(n_c)
    R: dict[int, dict[int, int]] = {}
    best: dict[int, tuple[int, int, int, int, int]] = {}
    for k in range(1, t + 1):
        reps, proj, wts, hs = _representatives(data, controls, k, t)
        R[k] = {}
        for e, p, wt, hk in zip(reps.tolist(), proj.tolist(), wts.tolist(), hs.tolist()):
            c = min(p, p ^ full_c)
            R[k][c] = e
            if c not in best or hk > best[c][1]:
                best[c] = (p, hk, e, k, wt)
    keys = sorted(best)
    arr = [best[c] for c in keys]
    return FaultTables(
        controls=controls,
        t=t,
        data_width=data.width,
        ancilla=ancilla,
        R=R,
        proj=np.array([a[0] for a in arr], dtype=np.uint64),
        budget=np.array([a[1] for a in arr], dtype=np.int16),
        rep=np.array([a[2] for a in arr], dtype=np.uint64),
        rep_order=np.array([a[3] for a in arr], dtype=np.int16),
        rep_weight=np.array([a[4] for a in arr], dtype=np.int16),
    )
