"""Exact low-order fault expansion of the acceptance statistics.

Every location fires independently with probability ``q_l`` and then applies one
of its ``n_l`` Paulis uniformly. Summing over all configurations with at most two
firing locations gives ``P(accept, k)`` up to the probability mass of three or
more firings, which is returned as a rigorous error bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import bits
from ..circuits import VerifiedPrepCircuit
from .frame import CompiledCircuit, NoiseModel, single_fault_outcomes


@dataclass(frozen=True)
class ExpansionReport:
    R_acc: float
    P: tuple[float, ...]
    tail: float  # mass of configurations with three or more faults
    order: int


def _pack(a: np.ndarray) -> np.ndarray:
    """Bool [n, shots] -> uint64 masks per shot (bit i = row i)."""
    out = np.zeros(a.shape[1], dtype=np.uint64)
    for i in range(a.shape[0]):
        out |= a[i].astype(np.uint64) << np.uint64(i)
    return out


def fault_signatures(cc: CompiledCircuit, nm: NoiseModel | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per single fault: (location index, data X mask, ancilla outcome mask)."""
    faults = cc.faults if nm is None else cc.noise_faults(nm)
    out = single_fault_outcomes(cc, faults)
    loc = np.array([f.location for f in faults], dtype=np.int64)
    return loc, _pack(out.data_x), _pack(out.ancilla)


def low_order_expansion(c: VerifiedPrepCircuit | CompiledCircuit, nm: NoiseModel, order: int = 2) -> ExpansionReport:
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    cc = c if isinstance(c, CompiledCircuit) else CompiledCircuit(c)
    w, wp = cc.w, cc.w_prime
    q = np.array([cc.location_probability(loc, nm) for loc in cc.locations])
    n_opt = np.array([len(loc.options) for loc in cc.locations], dtype=float)
    if np.any(q >= 1.0):
        raise ValueError("expansion requires every location probability below 1")
    p0 = float(np.prod(1.0 - q))
    r = q / (1.0 - q)
    loc, dm, am = fault_signatures(cc, nm)
    weight = r[loc] / n_opt[loc]
    full_a = np.uint64(bits.full_mask(wp))
    nk = w // 2 + 1
    joint = np.zeros(nk)

    def accumulate(d: np.ndarray, a: np.ndarray, wt: np.ndarray) -> None:
        acc = (a == 0) | (a == full_a)
        k = bits.weight_array(d[acc], w)
        joint[:] += np.bincount(k, weights=wt[acc], minlength=nk)[:nk]

    joint[0] += 1.0
    mass = 1.0
    if order >= 1:
        accumulate(dm, am, weight)
        mass += float(r.sum())
    if order >= 2:
        for i in range(len(loc)):
            j = np.flatnonzero(loc > loc[i])
            if len(j):
                accumulate(dm[i] ^ dm[j], am[i] ^ am[j], weight[i] * weight[j])
        s1 = float(r.sum())
        mass += 0.5 * (s1 * s1 - float((r * r).sum()))
    joint *= p0
    tail = max(0.0, 1.0 - p0 * mass)
    R = float(joint.sum())
    P = tuple(float(x / R) for x in joint) if R > 0 else tuple(0.0 for _ in joint)
    return ExpansionReport(R, P, tail, order)


def expansion_tolerance(report: ExpansionReport, shots: int, sigmas: float = 4.0) -> float:
    """Allowed |MC - expansion| gap: truncation tail plus ``sigmas`` standard errors."""
    r = report.R_acc
    return report.tail + sigmas * math.sqrt(max(r * (1 - r), 1e-12) / shots)
