"""Shared result types and the per-control-set table cache."""

from __future__ import annotations

import enum
from collections.abc import Sequence
from dataclasses import dataclass, field

from ..circuits import PartialTransversalCX, PrepCircuit
from ..faults import FaultSet, FaultTables, build_tables, closure, fault_set, single_fault_set


class Status(str, enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    TIMEOUT = "TIMEOUT"
    FAIL = "FAIL"  # incomplete engine gave up; says nothing about satisfiability


@dataclass
class SearchResult:
    status: Status
    engine: str
    controls: list[int] | None = None
    sigma: list[int] | None = None
    stats: dict = field(default_factory=dict)

    @property
    def wiring(self) -> PartialTransversalCX | None:
        if self.controls is None or self.sigma is None:
            return None
        return PartialTransversalCX.from_permutation(self.controls, self.sigma)

    def __bool__(self) -> bool:
        return self.status is Status.SAT


class TableCache:
    """Fault sets of one (data, ancilla, t) instance plus lazily built tables per control set."""

    def __init__(self, data: PrepCircuit, ancilla: PrepCircuit, t: int, budget: int | None = None) -> None:
        if t < 1:
            raise ValueError("t must be at least 1")
        self.data = data
        self.ancilla = ancilla
        self.t = t
        self.data_faults: FaultSet = fault_set(data, t, budget)
        e1 = single_fault_set(ancilla)
        self.ancilla_faults: FaultSet = closure(ancilla.width, [int(x) for x in e1.masks], t - 1, budget)
        self._tables: dict[tuple[int, ...], FaultTables] = {}

    @property
    def w(self) -> int:
        return self.data.width

    @property
    def w_prime(self) -> int:
        return self.ancilla.width

    def tables(self, controls: Sequence[int]) -> FaultTables:
        key = tuple(sorted(int(q) for q in controls))
        tab = self._tables.get(key)
        if tab is None:
            tab = build_tables(self.data_faults, self.ancilla_faults, list(key), self.t)
            self._tables[key] = tab
        return tab

    def __len__(self) -> int:
        return len(self._tables)
