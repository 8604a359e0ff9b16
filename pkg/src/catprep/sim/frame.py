"""Vectorized Pauli-frame simulation of assembled verification circuits.

The frame holds X and Z bits per (qubit, shot), relative to the ideal
execution. A CNOT copies X from control to target and Z from target to
control. Ancilla outcomes are the X bits (plus any readout flip); the data
block is read out noiselessly at the end.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..circuits import VerifiedPrepCircuit

# single-qubit Pauli index: 0=I, 1=X, 2=Y, 3=Z
_X = np.array([0, 1, 1, 0], dtype=bool)
_Z = np.array([0, 0, 1, 1], dtype=bool)


@dataclass(frozen=True)
class NoiseModel:
    """Circuit-level noise of strength ``p``.

    Every CNOT is followed by two-qubit depolarizing noise of strength ``p``;
    preparations and ancilla readouts flip with probability ``2p/3``.
    ``init_error="flip"`` applies X to |0> and Z to |+> preparations;
    ``"phase"`` applies the opposite Pauli, which leaves the prepared state
    unchanged and so removes preparation noise from every statistic.
    """

    p: float
    init_error: str = "flip"

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.init_error not in ("flip", "phase"):
            raise ValueError(f"init_error must be 'flip' or 'phase', got {self.init_error!r}")

    @property
    def p_cx(self) -> float:
        return self.p

    @property
    def p_init(self) -> float:
        return 2.0 * self.p / 3.0

    @property
    def p_meas(self) -> float:
        return 2.0 * self.p / 3.0


@dataclass(frozen=True)
class Location:
    """A place where one fault can occur.

    ``kind`` is ``init`` (after a preparation), ``cx`` (after a CNOT) or
    ``meas`` (readout flip). ``region`` is ``data``, ``ancilla`` or
    ``transversal`` (the copying layer and the ancilla readout).
    ``options`` lists the Paulis the location can apply: single-qubit indices
    for ``init``/``meas``, codes ``4*pc + pt`` for ``cx``.
    """

    op: int
    kind: str
    qubits: tuple[int, ...]
    region: str
    options: tuple[int, ...]


@dataclass(frozen=True)
class Fault:
    """A concrete Pauli at a location (``pauli`` is one of ``location.options``)."""

    location: int
    pauli: int


class CompiledCircuit:
    """Flat operation list of a :class:`VerifiedPrepCircuit` with its fault locations."""

    def __init__(self, circuit: VerifiedPrepCircuit) -> None:
        self.circuit = circuit
        self.w = circuit.w
        self.w_prime = circuit.w_prime
        self.num_qubits = circuit.num_qubits
        ops = [op for op in circuit.to_flat().ops if op[0] != "TICK"]
        self.ops: tuple[tuple, ...] = tuple(ops)
        n_transversal = circuit.wiring.size
        cx_ops = [i for i, op in enumerate(ops) if op[0] == "CX"]
        transversal = set(cx_ops[len(cx_ops) - n_transversal :])
        locs: list[Location] = []
        for i, op in enumerate(ops):
            name = op[0]
            if name in ("PLUS", "ZERO"):
                q = op[1]
                region = "data" if q < self.w else "ancilla"
                locs.append(Location(i, "init", (q,), region, (3,) if name == "PLUS" else (1,)))
            elif name == "CX":
                c, t = op[1], op[2]
                if i in transversal:
                    region = "transversal"
                else:
                    region = "data" if c < self.w else "ancilla"
                locs.append(Location(i, "cx", (c, t), region, tuple(range(1, 16))))
            elif name == "MZ":
                locs.append(Location(i, "meas", (op[1],), "transversal", (1,)))
        self.locations: tuple[Location, ...] = tuple(locs)
        self.loc_at_op = {loc.op: j for j, loc in enumerate(locs)}
        self.ancilla_qubits = [op[1] for op in ops if op[0] == "MZ"]

    @cached_property
    def faults(self) -> list[Fault]:
        """Every single fault (location, Pauli) in location order."""
        return [Fault(j, p) for j, loc in enumerate(self.locations) for p in loc.options]

    def location_probability(self, loc: Location, nm: NoiseModel) -> float:
        return {"init": nm.p_init, "cx": nm.p_cx, "meas": nm.p_meas}[loc.kind]

    def noise_faults(self, nm: NoiseModel) -> list[Fault]:
        """Single faults the noise model can produce (differs from :attr:`faults` only for phase-type preparation errors)."""
        return [Fault(j, p) for j, loc in enumerate(self.locations) for p in noise_options(loc, nm)]


def noise_options(loc: Location, nm: NoiseModel) -> tuple[int, ...]:
    if loc.kind == "init" and nm.init_error == "phase":
        return tuple(4 - o for o in loc.options)  # X <-> Z
    return loc.options


@dataclass
class FrameOutcome:
    """Per-shot readout: ancilla bits, data X bits, acceptance and flip count."""

    ancilla: np.ndarray  # bool [w', shots]
    data_x: np.ndarray  # bool [w, shots]

    @property
    def accepted(self) -> np.ndarray:
        return np.all(self.ancilla == self.ancilla[:1], axis=0)

    @property
    def flips(self) -> np.ndarray:
        w = self.data_x.shape[0]
        s = self.data_x.sum(axis=0, dtype=np.int64)
        return np.minimum(s, w - s)


def _apply(x: np.ndarray, z: np.ndarray, loc: Location, pauli: np.ndarray, shots: np.ndarray) -> None:
    """XOR Paulis ``pauli`` (one per listed shot) into the frame at ``loc``."""
    if loc.kind == "cx":
        c, t = loc.qubits
        pc, pt = pauli // 4, pauli % 4
        np.bitwise_xor.at(x[c], shots, _X[pc])
        np.bitwise_xor.at(z[c], shots, _Z[pc])
        np.bitwise_xor.at(x[t], shots, _X[pt])
        np.bitwise_xor.at(z[t], shots, _Z[pt])
    else:
        (q,) = loc.qubits
        np.bitwise_xor.at(x[q], shots, _X[pauli])
        np.bitwise_xor.at(z[q], shots, _Z[pauli])


def run_frames(
    cc: CompiledCircuit,
    shots: int,
    *,
    nm: NoiseModel | None = None,
    rng: np.random.Generator | None = None,
    injections: dict[int, tuple[np.ndarray, np.ndarray]] | None = None,
) -> FrameOutcome:
    """Propagate ``shots`` frames through the circuit.

    ``nm``/``rng`` sample stochastic noise; ``injections`` maps a location index
    to (shot indices, Pauli codes) applied deterministically. Readout flips at
    ``meas`` locations are injected the same way.
    """
    nq = cc.num_qubits
    x = np.zeros((nq, shots), dtype=bool)
    z = np.zeros((nq, shots), dtype=bool)
    noisy = nm is not None and nm.p > 0
    if noisy and rng is None:
        raise ValueError("a random generator is required for noisy simulation")
    injections = injections or {}
    anc_out = []
    for i, op in enumerate(cc.ops):
        name = op[0]
        if name == "CX":
            c, t = op[1], op[2]
            x[t] ^= x[c]
            z[c] ^= z[t]
        j = cc.loc_at_op.get(i)
        if j is None:
            continue
        loc = cc.locations[j]
        if noisy:
            hit = np.flatnonzero(rng.random(shots) < cc.location_probability(loc, nm))
            if len(hit):
                if loc.kind == "cx":
                    paulis = rng.integers(1, 16, size=len(hit))
                else:
                    paulis = np.full(len(hit), noise_options(loc, nm)[0])
                _apply(x, z, loc, paulis, hit)
        if j in injections:
            idx, paulis = injections[j]
            _apply(x, z, loc, np.asarray(paulis), np.asarray(idx))
        if name == "MZ":
            anc_out.append(x[op[1]].copy())
    ancilla = np.array(anc_out) if anc_out else np.zeros((0, shots), dtype=bool)
    return FrameOutcome(ancilla, x[: cc.w].copy())


def inject(circuit: VerifiedPrepCircuit | CompiledCircuit, faults: Sequence[Fault]) -> tuple[bool, int]:
    """Noise-free run with the given faults; returns (accepted, k)."""
    cc = circuit if isinstance(circuit, CompiledCircuit) else CompiledCircuit(circuit)
    out = run_frames(cc, 1, injections=_group([(0, f) for f in faults]))
    return bool(out.accepted[0]), int(out.flips[0])


def _group(items: Sequence[tuple[int, Fault]]) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    by_loc: dict[int, tuple[list[int], list[int]]] = {}
    for shot, f in items:
        s, p = by_loc.setdefault(f.location, ([], []))
        s.append(shot)
        p.append(f.pauli)
    return {j: (np.array(s), np.array(p)) for j, (s, p) in by_loc.items()}


def single_fault_outcomes(cc: CompiledCircuit, faults: Sequence[Fault] | None = None) -> FrameOutcome:
    """One shot per single fault, all in one vectorized pass."""
    faults = cc.faults if faults is None else list(faults)
    return run_frames(cc, len(faults), injections=_group(list(enumerate(faults))))
