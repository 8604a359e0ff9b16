"""Ancilla-size lower bounds and the ordered enumeration of admissible control sets.

A single fault spreading to a set ``S`` of data qubits is cancelled by one
ancilla fault per control inside ``S``. With ``c`` controls in ``S`` this spends
``1 + c`` faults and leaves weight ``wt(S)``, so FT order ``t`` forces
``c >= min(t, wt(S) - 1)``. The single-fault supports of a tree circuit form a
laminar family, so the per-set requirements combine bottom-up.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterator
from dataclasses import dataclass, field

from .. import bits
from ..circuits import PrepCircuit
from ..faults import single_fault_set


@dataclass(frozen=True)
class SubtreeConstraint:
    """At least ``need`` of the qubits in ``mask`` must be controls."""

    mask: int
    need: int


@dataclass
class _Node:
    mask: int
    need: int
    children: list[_Node] = field(default_factory=list)
    loose: list[int] = field(default_factory=list)
    floor: int = 0  # fewest controls any admissible selection places in this set

    @property
    def size(self) -> int:
        return bits.popcount(self.mask)


@dataclass(frozen=True)
class LowerBound:
    w_min: int
    constraints: tuple[SubtreeConstraint, ...]
    laminar: bool


def subtree_constraints(data: PrepCircuit, t: int) -> list[SubtreeConstraint]:
    w = data.width
    out = []
    for m in sorted(int(x) for x in single_fault_set(data).masks):
        if m == 0:
            continue
        need = min(t, bits.weight(m, w) - 1)
        if need > 0:
            out.append(SubtreeConstraint(m, need))
    return out


def _is_laminar(masks: list[int]) -> bool:
    for a, b in itertools.combinations(masks, 2):
        inter = a & b
        if inter and inter != a and inter != b:
            return False
    return True


def _build_forest(w: int, cons: list[SubtreeConstraint]) -> _Node:
    need: dict[int, int] = {}
    for c in cons:
        need[c.mask] = max(need.get(c.mask, 0), c.need)
    root = _Node(bits.full_mask(w), need.pop(bits.full_mask(w), 0))
    # insert largest sets first so each lands under its smallest superset
    for m in sorted(need, key=lambda m: (-bits.popcount(m), m)):
        node = root
        while True:
            nxt = next((ch for ch in node.children if ch.mask & m == m), None)
            if nxt is None:
                break
            node = nxt
        node.children.append(_Node(m, need[m]))

    def finish(node: _Node) -> None:
        covered = 0
        for ch in node.children:
            finish(ch)
            covered |= ch.mask
        node.loose = bits.support(node.mask & ~covered)
        node.floor = max(node.need, sum(ch.floor for ch in node.children))

    finish(root)
    return root


def ancilla_lower_bound(data: PrepCircuit, t: int) -> LowerBound:
    """Smallest ancilla width compatible with every single-fault subtree requirement."""
    cons = subtree_constraints(data, t)
    laminar = _is_laminar([c.mask for c in cons])
    if laminar:
        w_min = _build_forest(data.width, cons).floor
    else:
        w_min = max((c.need for c in cons), default=0)
    return LowerBound(max(w_min, 1), tuple(cons), laminar)


def satisfies(controls: list[int] | tuple[int, ...], constraints) -> bool:
    sel = bits.from_support(controls)
    return all(bits.popcount(sel & c.mask) >= c.need for c in constraints)


def _distributions(parts: list[tuple[int, int, int]], total: int) -> list[tuple[int, ...]]:
    """Count vectors with lo <= c_i <= hi summing to ``total``, most proportional first."""
    size = sum(p[2] for p in parts)
    out: list[tuple[int, ...]] = []

    def rec(i: int, left: int, acc: list[int]) -> None:
        if i == len(parts):
            if left == 0:
                out.append(tuple(acc))
            return
        lo, hi, _ = parts[i]
        rest_lo = sum(p[0] for p in parts[i + 1 :])
        rest_hi = sum(p[1] for p in parts[i + 1 :])
        for c in range(max(lo, left - rest_hi), min(hi, left - rest_lo) + 1):
            acc.append(c)
            rec(i + 1, left - c, acc)
            acc.pop()

    rec(0, total, [])

    def score(v: tuple[int, ...]) -> float:
        return sum((c - total * p[2] / size) ** 2 for c, p in zip(v, parts))

    out.sort(key=lambda v: (score(v), tuple(-c for c in v)))
    return out


def _select(node: _Node, count: int) -> Iterator[tuple[int, ...]]:
    parts = [(ch.floor, ch.size, ch.size) for ch in node.children]
    parts.append((0, len(node.loose), max(len(node.loose), 1)))
    for dist in _distributions(parts, count):
        yield from _product(node, dist, 0)


def _product(node: _Node, dist: tuple[int, ...], i: int) -> Iterator[tuple[int, ...]]:
    if i == len(node.children):
        yield from itertools.combinations(node.loose, dist[-1])
        return
    for head in _select(node.children[i], dist[i]):
        for tail in _product(node, dist, i + 1):
            yield head + tail


def enumerate_controls(data: PrepCircuit, t: int, w_prime: int) -> Iterator[list[int]]:
    """Control sets of size ``w_prime`` meeting every subtree requirement.

    Balanced selections (counts per subtree closest to proportional) come
    first; the order is deterministic and the enumeration is complete.
    """
    w = data.width
    if not 1 <= w_prime <= w:
        return
    cons = subtree_constraints(data, t)
    if not _is_laminar([c.mask for c in cons]):
        for combo in itertools.combinations(range(w), w_prime):
            if satisfies(combo, cons):
                yield list(combo)
        return
    root = _build_forest(w, cons)
    if w_prime < root.floor:
        return
    for sel in _select(root, w_prime):
        yield sorted(sel)
