"""Exhaustive fault injection within the two preparation subcircuits.

Pauli frames compose by XOR, so the outcome of any fault combination is the
XOR of the single-fault outcomes. The closure over joint (data, ancilla
readout) patterns therefore enumerates every outcome reachable with at most
``t`` faults, together with the fewest faults that produce it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import bits
from ..circuits import VerifiedPrepCircuit
from ..faults import closure
from .expansion import fault_signatures
from .frame import CompiledCircuit

PREP_REGIONS = ("data", "ancilla")


@dataclass(frozen=True)
class InjectionViolation:
    faults: int
    data_x: int
    ancilla: int
    k: int


def exhaustive_injection(
    c: VerifiedPrepCircuit | CompiledCircuit,
    t: int,
    *,
    regions: tuple[str, ...] = PREP_REGIONS,
    strict: bool = False,
    budget: int | None = None,
) -> list[InjectionViolation]:
    """Accepted outcomes from at most ``t`` faults whose flip count exceeds ``t``.

    With ``strict`` an outcome is also reported when its flip count exceeds the
    number of faults that produced it.
    """
    cc = c if isinstance(c, CompiledCircuit) else CompiledCircuit(c)
    w, wp = cc.w, cc.w_prime
    if w + wp > 64:
        raise ValueError("joint patterns must fit in 64 bits")
    loc, dm, am = fault_signatures(cc)
    keep = np.array([cc.locations[j].region in regions for j in loc], dtype=bool)
    joint = dm[keep] | (am[keep] << np.uint64(w))
    fs = closure(w + wp, [int(x) for x in np.unique(joint)], t, budget)
    d = fs.masks & np.uint64(bits.full_mask(w))
    a = fs.masks >> np.uint64(w)
    acc = (a == 0) | (a == np.uint64(bits.full_mask(wp)))
    k = bits.weight_array(d, w)
    limit = fs.faults.astype(np.int64) if strict else np.full(len(k), t)
    bad = np.flatnonzero(acc & (k > limit))
    return [InjectionViolation(int(fs.faults[i]), int(d[i]), int(a[i]), int(k[i])) for i in bad]
