"""Joint search over control selection and wiring by counterexample-guided refinement.

Boolean ``y[q][j]`` says data qubit ``q`` drives ancilla qubit ``j``. Each ancilla
column has exactly one driver and each data row at most one target, which
encodes "exactly w' controls, wired bijectively". A counterexample is a data
error ``e`` whose copy equals a forbidden pattern ``g``; the refinement clause
says some ancilla qubit disagrees with ``g``:

    OR_{j in g, q not in e} y[q][j]  OR  OR_{j not in g, q in e} y[q][j]

No auxiliary variables are needed because every column has exactly one driver.
The clause is sound for every wiring, since whether ``f(e) = g`` is a
violation depends only on ``e`` and ``g``.
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
from .bounds import ancilla_lower_bound, subtree_constraints
from .common import SearchResult, Status, TableCache
from .fixed import DEFAULT_SOLVER

logger = logging.getLogger(__name__)

DEFAULT_REFINEMENT_CAP = 50_000


class WiringEncoding:
    def __init__(self, w: int, w_prime: int, solver: str = DEFAULT_SOLVER) -> None:
        self.w = w
        self.n = w_prime
        self.pool = IDPool()
        self.y = [[self.pool.id(("y", q, j)) for j in range(w_prime)] for q in range(w)]
        self.solver = Solver(name=solver)
        self.clauses: list[list[int]] = []
        for j in range(w_prime):
            lits = [self.y[q][j] for q in range(w)]
            self._add_card(CardEnc.equals(lits=lits, bound=1, vpool=self.pool, encoding=EncType.seqcounter))
        for q in range(w):
            lits = self.y[q]
            self._add_card(CardEnc.atmost(lits=lits, bound=1, vpool=self.pool, encoding=EncType.pairwise))

    def _add_card(self, cnf) -> None:
        self.solver.append_formula(cnf.clauses)

    def require_controls(self, mask: int, need: int) -> None:
        """At least ``need`` controls among the qubits of ``mask``."""
        lits = [self.y[q][j] for q in bits.support(mask) for j in range(self.n)]
        if need > 0:
            self._add_card(CardEnc.atleast(lits=lits, bound=need, vpool=self.pool, encoding=EncType.seqcounter))

    def blocking_clause(self, e: int, g: int) -> list[int]:
        """Clause asserting ``f(e) != g``."""
        inside = bits.support(e)
        outside = [q for q in range(self.w) if not (e >> q) & 1]
        lits = []
        for j in range(self.n):
            rows = outside if (g >> j) & 1 else inside
            lits.extend(self.y[q][j] for q in rows)
        return lits

    def block(self, e: int, g: int) -> list[int]:
        clause = self.blocking_clause(e, g)
        self.solver.add_clause(clause)
        self.clauses.append(clause)
        return clause

    def solve(self, conflicts: int | None) -> bool | None:
        if conflicts is None:
            return self.solver.solve()
        self.solver.conf_budget(conflicts)
        return self.solver.solve_limited()

    def assignment(self) -> tuple[list[int], list[int]]:
        """(sorted controls, sigma aligned with them) from the current model."""
        pos = {v for v in self.solver.get_model() if v > 0}
        target = {}
        for q in range(self.w):
            for j in range(self.n):
                if self.y[q][j] in pos:
                    target[q] = j
        controls = sorted(target)
        return controls, [target[q] for q in controls]

    def literals_of(self, controls: Sequence[int], sigma: Sequence[int]) -> set[int]:
        return {self.y[q][j] for q, j in zip(controls, sigma)}

    def close(self) -> None:
        self.solver.delete()


def clause_satisfied(clause: Sequence[int], true_lits: set[int]) -> bool:
    return any(lit in true_lits for lit in clause)


def solve_cegar(
    data: PrepCircuit,
    ancilla: PrepCircuit,
    w_prime: int | None = None,
    t: int = 1,
    budget: int | None = DEFAULT_REFINEMENT_CAP,
    *,
    cache: TableCache | None = None,
    conflicts: int | None = None,
    structural: bool = False,
    blocks_per_round: int = 64,
    time_limit: float | None = None,
    solver: str = DEFAULT_SOLVER,
    keep_clauses: bool = False,
) -> SearchResult:
    """Solve-check-refine loop over (controls, wiring).

    ``budget`` caps the number of blocking clauses; ``conflicts`` caps each
    solver call. Either limit (or ``time_limit`` seconds) yields TIMEOUT.
    ``structural`` adds the necessary per-subtree control counts up front.
    Each round blocks up to ``blocks_per_round`` violated table entries.
    """
    w = data.width
    w_prime = ancilla.width if w_prime is None else w_prime
    if w_prime != ancilla.width:
        raise ValueError(f"ancilla has width {ancilla.width}, expected {w_prime}")
    if not 1 <= w_prime <= w:
        raise ValueError(f"ancilla width {w_prime} outside [1, {w}]")
    cache = cache or TableCache(data, ancilla, t)
    start = time.perf_counter()
    stats: dict = {"refinements": 0, "rounds": 0, "control_sets": 0}
    if structural and w_prime < ancilla_lower_bound(data, t).w_min:
        # cardinality conflicts are pigeonhole-hard for CDCL; decide them directly
        return SearchResult(Status.UNSAT, "cegar", stats={**stats, "reason": "lower bound", "seconds": 0.0})
    enc = WiringEncoding(w, w_prime, solver)
    if structural:
        for c in subtree_constraints(data, t):
            enc.require_controls(c.mask, c.need)
    full = bits.full_mask(w_prime)

    def done(status: Status, controls=None, sigma=None) -> SearchResult:
        stats["control_sets"] = len(cache)
        stats["seconds"] = round(time.perf_counter() - start, 6)
        if keep_clauses:
            stats["clauses"] = list(enc.clauses)
        return SearchResult(status, "cegar", controls, sigma, stats)

    try:
        while True:
            if time_limit is not None and time.perf_counter() - start > time_limit:
                return done(Status.TIMEOUT)
            res = enc.solve(conflicts)
            if res is None:
                return done(Status.TIMEOUT)
            if not res:
                return done(Status.UNSAT)
            controls, sigma = enc.assignment()
            tables = cache.tables(controls)
            hit = np.flatnonzero(tables.violated(sigma))
            if len(hit) == 0:
                return done(Status.SAT, controls, sigma)
            stats["rounds"] += 1
            images = tables.images(sigma)
            for i in hit[:blocks_per_round].tolist():
                e = int(tables.rep[i])
                g = int(images[i])
                enc.block(e, g)
                enc.block(e, g ^ full)
                stats["refinements"] += 2
            if budget is not None and stats["refinements"] > budget:
                return done(Status.TIMEOUT)
    finally:
        enc.close()
