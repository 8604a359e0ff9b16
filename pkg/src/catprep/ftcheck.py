"""Fault-tolerance verdicts for a partial transversal CNOT.

Two independent routes: :func:`check_permutation` consults precomputed
:class:`~catprep.faults.FaultTables`; :func:`oracle_check` enumerates the fault
sets of both circuits and tests every error pair directly.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from . import bits
from .circuits import PartialTransversalCX, PrepCircuit
from .errors import CircuitError
from .faults import FaultSet, FaultTables, closure, fault_set, single_fault_set


@dataclass(frozen=True)
class Violation:
    """Data error ``e`` from ``k`` faults whose copy is cancelled by ancilla error ``e_anc`` from ``k_anc`` faults."""

    e: int
    k: int
    e_anc: int
    k_anc: int
    weight: int
    w: int
    w_prime: int

    def to_record(self) -> str:
        return (
            f"violation e={bits.to_hex(self.e, self.w)} k={self.k} "
            f"e_anc={bits.to_hex(self.e_anc, self.w_prime)} k_anc={self.k_anc} weight={self.weight}"
        )


def _check_sigma(sigma: Sequence[int], n: int) -> list[int]:
    sigma = [int(s) for s in sigma]
    if sorted(sigma) != list(range(n)):
        raise CircuitError(f"{sigma} is not a permutation of range({n})")
    return sigma


def _cancelling(ancilla: FaultSet, image: int, limit: int) -> tuple[int, int]:
    # the ancilla error (image or its complement) with fewest faults
    full = bits.full_mask(ancilla.width)
    d0 = ancilla.min_faults(image)
    d1 = ancilla.min_faults(image ^ full)
    if d1 < d0:
        return image ^ full, d1
    return image, d0


def check_permutation(sigma: Sequence[int], tables: FaultTables) -> Violation | None:
    """Table-driven check; returns the first violated entry in class order, or None."""
    sigma = _check_sigma(sigma, tables.w_prime)
    hit = np.flatnonzero(tables.violated(sigma))
    if len(hit) == 0:
        return None
    i = int(hit[0])
    image = int(tables.images(sigma)[i])
    e_anc, k_anc = _cancelling(tables.ancilla, image, int(tables.budget[i]))
    e = int(tables.rep[i])
    return Violation(e, int(tables.rep_order[i]), e_anc, k_anc, bits.weight(e, tables.data_width), tables.data_width, tables.w_prime)


def _ancilla_set(ancilla: PrepCircuit, order: int, budget: int | None) -> FaultSet:
    e1 = single_fault_set(ancilla)
    return closure(ancilla.width, [int(x) for x in e1.masks], max(order, 0), budget)


def violation_scan(
    data_faults: FaultSet,
    ancilla_faults: FaultSet,
    wiring: PartialTransversalCX,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """For every enumerated data error: (mask, faults, weight, fewest cancelling ancilla faults)."""
    m = data_faults.masks
    d = data_faults.faults.astype(np.int64)
    wt = bits.weight_array(m, data_faults.width)
    image = bits.scatter_array(bits.project_array(m, wiring.controls), wiring.targets)
    da = ancilla_faults.distances(image, modulo_stabilizer=True).astype(np.int64)
    return m, d, wt, da


def oracle_check(
    data: PrepCircuit,
    ancilla: PrepCircuit,
    wiring: PartialTransversalCX,
    T: int,
    *,
    budget: int | None = None,
) -> Violation | None:
    """Exhaustive fault-tolerance verdict at order ``T``.

    A violation is a data error ``e`` from ``k`` faults and an ancilla error
    ``e'`` from ``k'`` faults with ``k + k' <= T``, ``f(e) + e'`` in
    {0, all-ones} and ``wt(e) > k + k'``. Requiring the weight to exceed the
    number of faults actually spent (rather than ``T``) makes the verdict
    monotone in ``T``. The returned witness minimizes (k + k', k, e).
    """
    if T < 1:
        raise ValueError("T must be positive")
    wiring.validate(data.width, ancilla.width)
    D = fault_set(data, T, budget)
    A = _ancilla_set(ancilla, T - 1, budget)
    m, d, wt, da = violation_scan(D, A, wiring)
    total = d + da
    viol = (total <= T) & (wt > total)
    if not viol.any():
        return None
    idx = np.flatnonzero(viol)
    best = idx[np.lexsort((m[idx], d[idx], total[idx]))[0]]
    e = int(m[best])
    e_anc, k_anc = _cancelling(A, wiring.image(e), int(da[best]))
    return Violation(e, int(d[best]), e_anc, k_anc, int(wt[best]), data.width, ancilla.width)


def max_ft_order(
    data: PrepCircuit,
    ancilla: PrepCircuit,
    wiring: PartialTransversalCX,
    T_max: int,
    *,
    budget: int | None = None,
) -> int:
    """Largest ``T <= T_max`` at which :func:`oracle_check` passes (0 if none)."""
    if T_max < 1:
        return 0
    wiring.validate(data.width, ancilla.width)
    D = fault_set(data, T_max, budget)
    A = _ancilla_set(ancilla, T_max - 1, budget)
    _, d, wt, da = violation_scan(D, A, wiring)
    total = d + da
    viol = (total <= T_max) & (wt > total)
    if not viol.any():
        return T_max
    return int(total[viol].min()) - 1
