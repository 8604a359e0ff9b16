"""Cat-state preparation circuits and their transversally verified assemblies."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property

from .errors import CircuitError, FormatError

Layer = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class PrepCircuit:
    """CNOT-tree preparation of a ``width``-qubit cat state.

    ``root`` starts in |+>, every other qubit in |0>. ``layers`` holds disjoint
    (control, target) pairs; each target is entangled exactly once.
    """

    width: int
    root: int
    layers: tuple[Layer, ...]

    def __post_init__(self) -> None:
        w = self.width
        if w < 1:
            raise CircuitError(f"width must be positive, got {w}")
        if not 0 <= self.root < w:
            raise CircuitError(f"root {self.root} out of range for width {w}")
        layers = tuple(tuple((int(c), int(t)) for c, t in layer) for layer in self.layers)
        object.__setattr__(self, "layers", layers)
        entangled = {self.root}
        for i, layer in enumerate(layers):
            if not layer:
                raise CircuitError(f"layer {i} is empty")
            seen: set[int] = set()
            fresh = []
            for c, t in layer:
                for q in (c, t):
                    if not 0 <= q < w:
                        raise CircuitError(f"qubit {q} out of range in layer {i}")
                    if q in seen:
                        raise CircuitError(f"qubit {q} used twice in layer {i}")
                    seen.add(q)
                if c not in entangled:
                    raise CircuitError(f"control {c} in layer {i} is not entangled yet")
                if t in entangled:
                    raise CircuitError(f"target {t} in layer {i} is already entangled")
                fresh.append(t)
            entangled.update(fresh)
        if len(entangled) != w:
            missing = sorted(set(range(w)) - entangled)
            raise CircuitError(f"qubits {missing} are never entangled")

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def cnots(self) -> list[tuple[int, int]]:
        return [g for layer in self.layers for g in layer]

    @property
    def num_cnots(self) -> int:
        return sum(len(layer) for layer in self.layers)

    @cached_property
    def parent(self) -> tuple[int, ...]:
        """``parent[q]`` is the control that entangles ``q``; -1 for the root."""
        out = [-1] * self.width
        for c, t in self.cnots:
            out[t] = c
        return tuple(out)


@dataclass(frozen=True)
class PartialTransversalCX:
    """Injective wiring of data controls onto every ancilla qubit.

    ``pairs`` holds (data index, ancilla index) tuples, sorted by data index.
    """

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        pairs = tuple(sorted((int(c), int(a)) for c, a in self.pairs))
        object.__setattr__(self, "pairs", pairs)
        ctrl = [c for c, _ in pairs]
        anc = [a for _, a in pairs]
        if len(set(ctrl)) != len(ctrl):
            raise CircuitError("a data qubit appears more than once in the wiring")
        if len(set(anc)) != len(anc):
            raise CircuitError("an ancilla qubit appears more than once in the wiring")

    @classmethod
    def from_permutation(cls, controls: Sequence[int], sigma: Sequence[int]) -> PartialTransversalCX:
        """Control ``controls[i]`` targets ancilla ``sigma[i]``."""
        if len(controls) != len(sigma):
            raise CircuitError("controls and permutation differ in length")
        return cls(tuple(zip(controls, sigma)))

    @classmethod
    def identity(cls, w_prime: int) -> PartialTransversalCX:
        return cls(tuple((i, i) for i in range(w_prime)))

    @property
    def size(self) -> int:
        return len(self.pairs)

    @property
    def controls(self) -> list[int]:
        return [c for c, _ in self.pairs]

    @property
    def targets(self) -> list[int]:
        return [a for _, a in self.pairs]

    def validate(self, w: int, w_prime: int) -> None:
        if self.size != w_prime:
            raise CircuitError(f"wiring has {self.size} pairs, ancilla has {w_prime} qubits")
        for c, a in self.pairs:
            if not 0 <= c < w:
                raise CircuitError(f"data index {c} out of range for width {w}")
            if not 0 <= a < w_prime:
                raise CircuitError(f"ancilla index {a} out of range for width {w_prime}")

    def image(self, e: int) -> int:
        """Copy of data error ``e`` on the ancilla (the associated F2-linear map)."""
        out = 0
        for c, a in self.pairs:
            if (e >> c) & 1:
                out |= 1 << a
        return out


@dataclass(frozen=True)
class CircuitMetrics:
    depth_report: int
    cx_count: int
    qubit_count: int
    cnot_depth: int


@dataclass(frozen=True)
class VerifiedPrepCircuit:
    """Data and ancilla cat states joined by a partial transversal CNOT.

    In flat indexing the data occupies qubits ``0..w-1`` and the ancilla ``w..w+w'-1``.
    Every ancilla qubit is measured in Z after the transversal layer.
    """

    data: PrepCircuit
    ancilla: PrepCircuit
    wiring: PartialTransversalCX

    @property
    def w(self) -> int:
        return self.data.width

    @property
    def w_prime(self) -> int:
        return self.ancilla.width

    @property
    def num_qubits(self) -> int:
        return self.w + self.w_prime

    @property
    def cx_count(self) -> int:
        return self.data.num_cnots + self.ancilla.num_cnots + self.wiring.size

    def to_flat(self) -> FlatCircuit:
        w = self.w
        depth = max(self.data.depth, self.ancilla.depth)
        offset = depth - self.ancilla.depth
        ops: list[tuple] = []
        for q in range(w):
            ops.append(("PLUS" if q == self.data.root else "ZERO", q))
        for q in range(self.w_prime):
            ops.append(("PLUS" if q == self.ancilla.root else "ZERO", w + q))
        ops.append(("TICK",))
        for step in range(depth):
            if step < self.data.depth:
                ops.extend(("CX", c, t) for c, t in self.data.layers[step])
            if step >= offset:
                ops.extend(("CX", w + c, w + t) for c, t in self.ancilla.layers[step - offset])
            ops.append(("TICK",))
        ops.extend(("CX", c, w + a) for c, a in self.wiring.pairs)
        ops.append(("TICK",))
        ops.extend(("MZ", w + q) for q in range(self.w_prime))
        return FlatCircuit(self.num_qubits, tuple(ops))

    def to_text(self) -> str:
        return self.to_flat().to_text()


@dataclass(frozen=True)
class FlatCircuit:
    """Gate list in the line-oriented text format (``QUBITS``/``PLUS``/``ZERO``/``CX``/``TICK``/``MZ``)."""

    num_qubits: int
    ops: tuple[tuple, ...]

    @property
    def measured(self) -> list[int]:
        return [op[1] for op in self.ops if op[0] == "MZ"]

    @property
    def unmeasured(self) -> list[int]:
        m = set(self.measured)
        return [q for q in range(self.num_qubits) if q not in m]

    def to_text(self) -> str:
        lines = [f"QUBITS {self.num_qubits}"]
        lines.extend(" ".join(str(x) for x in op) for op in self.ops)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> FlatCircuit:
        n = None
        ops: list[tuple] = []
        arity = {"PLUS": 1, "ZERO": 1, "MZ": 1, "CX": 2, "TICK": 0}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            name, *args = line.split()
            if name == "QUBITS":
                if n is not None or len(args) != 1:
                    raise FormatError(f"line {lineno}: bad QUBITS declaration")
                n = int(args[0])
                continue
            if name not in arity or len(args) != arity[name]:
                raise FormatError(f"line {lineno}: cannot parse {raw!r}")
            if n is None:
                raise FormatError(f"line {lineno}: gate before QUBITS")
            try:
                qs = [int(a) for a in args]
            except ValueError as exc:
                raise FormatError(f"line {lineno}: non-integer qubit index") from exc
            if any(not 0 <= q < n for q in qs):
                raise FormatError(f"line {lineno}: qubit index out of range")
            ops.append((name, *qs))
        if n is None:
            raise FormatError("missing QUBITS declaration")
        return cls(n, tuple(ops))


def ceil_log2(n: int) -> int:
    return max(0, math.ceil(math.log2(n))) if n > 1 else 0


def _dyadic_layers(starts: Sequence[int]) -> list[list[tuple[int, int]]]:
    # balanced tree over len(starts) slots (a power of two); slot i is led by qubit starts[i]
    m = len(starts)
    layers: list[list[tuple[int, int]]] = [[] for _ in range(ceil_log2(m))]

    def rec(lo: int, n: int, depth: int) -> None:
        if n <= 1:
            return
        half = n // 2
        layers[depth].append((starts[lo], starts[lo + half]))
        rec(lo, half, depth + 1)
        rec(lo + half, half, depth + 1)

    rec(0, m, 0)
    return layers


def _spread_layers(w: int) -> list[list[tuple[int, int]]]:
    layers: list[list[tuple[int, int]]] = [[] for _ in range(ceil_log2(w))]

    def rec(lo: int, n: int, depth: int) -> None:
        if n <= 1:
            return
        left = (n + 1) // 2
        layers[depth].append((lo, lo + left))
        rec(lo, left, depth + 1)
        rec(lo + left, n - left, depth + 1)

    rec(0, w, 0)
    return layers


def build_balanced_tree(w: int, *, spread: bool = False) -> PrepCircuit:
    """Balanced-tree preparation B_w of depth ceil(log2 w), rooted at qubit 0.

    Each layer doubles the entangled set. Every single-fault support is a
    contiguous interval of qubits. When ``w`` is not a power of two the final
    layer has ``w - 2**(depth-1)`` CNOTs; by default they are driven by the
    lowest-indexed subtrees, with ``spread=True`` intervals are instead split
    evenly (ceil/floor) at every level.
    """
    if w < 1:
        raise CircuitError(f"width must be positive, got {w}")
    if w == 1:
        return PrepCircuit(1, 0, ())
    if spread:
        layers = _spread_layers(w)
    else:
        depth = ceil_log2(w)
        m = 1 << (depth - 1)
        extra = w - m
        sizes = [2 if s < extra else 1 for s in range(m)]
        starts = [sum(sizes[:s]) for s in range(m)]
        layers = _dyadic_layers(starts)
        if extra:
            layers.append([(starts[s], starts[s] + 1) for s in range(extra)])
    return PrepCircuit(w, 0, tuple(tuple(layer) for layer in layers))


def build_from_tree(
    parent: Mapping[int, int] | Sequence[int],
    root: int | None = None,
    *,
    max_children: int | None = None,
) -> PrepCircuit:
    """Greedy-parallel layering of an arbitrary entanglement tree.

    ``parent`` maps each non-root qubit to the qubit whose CNOT entangles it
    (as a mapping, or a sequence with ``-1`` at the root). Each qubit fires its
    CNOTs one per layer as soon as it is entangled, deepest subtree first
    (ties: larger index first), which gives every CNOT its earliest layer.
    """
    if isinstance(parent, Mapping):
        pmap = {int(k): int(v) for k, v in parent.items()}
        nodes = set(pmap) | set(pmap.values())
        if root is not None:
            nodes.add(root)
        w = max(nodes) + 1 if nodes else 1
    else:
        pmap = {q: int(p) for q, p in enumerate(parent) if p is not None and p >= 0}
        w = len(parent)
    roots = [q for q in range(w) if q not in pmap]
    if root is None:
        if len(roots) != 1:
            raise CircuitError(f"expected exactly one root, found {roots}")
        root = roots[0]
    if roots != [root]:
        raise CircuitError(f"tree must have the single root {root}, parentless qubits: {roots}")
    children: dict[int, list[int]] = {q: [] for q in range(w)}
    for q, p in pmap.items():
        if not 0 <= p < w or not 0 <= q < w:
            raise CircuitError(f"edge {p}->{q} out of range")
        if p == q:
            raise CircuitError(f"qubit {q} is its own parent")
        children[p].append(q)
    if max_children is not None:
        for q, ch in children.items():
            if len(ch) > max_children:
                raise CircuitError(f"qubit {q} has {len(ch)} children, limit is {max_children}")

    # reachability from the root catches cycles
    order: list[int] = []
    stack = [root]
    while stack:
        q = stack.pop()
        order.append(q)
        stack.extend(children[q])
    if len(order) != w:
        raise CircuitError("parent map contains a cycle or disconnected qubits")

    height: dict[int, int] = {}
    for q in reversed(order):
        ch = sorted(children[q], key=lambda c: (-height[c], -c))
        children[q] = ch
        height[q] = max((i + 1 + height[c] for i, c in enumerate(ch)), default=0)

    layers: list[list[tuple[int, int]]] = [[] for _ in range(height[root])]
    start = {root: 0}
    for q in order:
        for i, c in enumerate(children[q]):
            layer = start[q] + i
            layers[layer].append((q, c))
            start[c] = layer + 1
    return PrepCircuit(w, root, tuple(tuple(sorted(layer)) for layer in layers))


def assemble(data: PrepCircuit, ancilla: PrepCircuit, wiring: PartialTransversalCX | Iterable[tuple[int, int]]) -> VerifiedPrepCircuit:
    if not isinstance(wiring, PartialTransversalCX):
        wiring = PartialTransversalCX(tuple(wiring))
    if ancilla.width > data.width:
        raise CircuitError(f"ancilla width {ancilla.width} exceeds data width {data.width}")
    wiring.validate(data.width, ancilla.width)
    return VerifiedPrepCircuit(data, ancilla, wiring)


def metrics(c: VerifiedPrepCircuit) -> CircuitMetrics:
    """Resource counts as tabulated: depth includes the transversal and measurement layers."""
    prep_depth = max(c.data.depth, c.ancilla.depth)
    return CircuitMetrics(
        depth_report=prep_depth + 2,
        cx_count=c.cx_count,
        qubit_count=c.num_qubits,
        cnot_depth=prep_depth + 1,
    )
