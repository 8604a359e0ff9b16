from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catprep import PartialTransversalCX, assemble, build_balanced_tree
from catprep.search import synthesize
from catprep.sim import (
    CompiledCircuit,
    Fault,
    NoiseModel,
    error_profile,
    estimate,
    exhaustive_injection,
    expansion_tolerance,
    inject,
    low_order_expansion,
    report_csv,
    run_frames,
)
from catprep.sim.frame import single_fault_outcomes

from conftest import EQ1_PAIRS


@pytest.fixture(scope="module")
def eq1_circuit():
    return assemble(build_balanced_tree(8), build_balanced_tree(6), EQ1_PAIRS)


@pytest.fixture(scope="module")
def ft3_w8():
    return synthesize(8, 3).circuit()


def naive_run(cc: CompiledCircuit, faults: list[Fault]) -> tuple[list[int], list[int]]:
    """Shot-by-shot bit simulation tracking only X components: (ancilla readout, data X bits)."""
    x = [0] * cc.num_qubits
    by_loc: dict[int, list[int]] = {}
    for f in faults:
        by_loc.setdefault(f.location, []).append(f.pauli)
    readout = []
    for i, op in enumerate(cc.ops):
        if op[0] == "CX":
            x[op[2]] ^= x[op[1]]
        j = cc.loc_at_op.get(i)
        if j is not None:
            loc = cc.locations[j]
            for p in by_loc.get(j, []):
                if loc.kind == "cx":
                    x[loc.qubits[0]] ^= (p // 4) in (1, 2)
                    x[loc.qubits[1]] ^= (p % 4) in (1, 2)
                else:
                    x[loc.qubits[0]] ^= p in (1, 2)
        if op[0] == "MZ":
            readout.append(x[op[1]])
    return readout, x[: cc.w]


def test_noiseless_always_accepts(eq1_circuit):
    rep = estimate(eq1_circuit, NoiseModel(0.0), 5000, seed=1)
    assert rep.R_acc == 1.0
    assert rep.P[0] == 1.0
    assert error_profile(eq1_circuit, NoiseModel(0.0), 100)[0] == 1.0


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel(1.5)
    with pytest.raises(ValueError):
        NoiseModel(0.1, init_error="other")
    nm = NoiseModel(0.003)
    assert (nm.p_cx, nm.p_init, nm.p_meas) == (0.003, 0.002, 0.002)


def test_copied_subtree_error_is_rejected(eq1_circuit):
    cc = CompiledCircuit(eq1_circuit)
    first = next(j for j, loc in enumerate(cc.locations) if loc.kind == "cx" and loc.qubits == (0, 4))
    accepted, _ = inject(cc, [Fault(first, 4)])  # X on the control after CX(0,4): pattern 0..3
    assert not accepted


def test_unwired_data_flip_is_accepted(eq1_circuit):
    cc = CompiledCircuit(eq1_circuit)
    assert 0 not in eq1_circuit.wiring.controls
    last = max(j for j, loc in enumerate(cc.locations) if loc.kind == "cx" and 0 in loc.qubits)
    assert inject(cc, [Fault(last, 4)]) == (True, 1)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=120, deadline=None)
def test_frame_matches_naive_propagation(seed):
    rng = np.random.default_rng(seed)
    w = int(rng.integers(3, 11))
    wp = int(rng.integers(2, w + 1))
    controls = sorted(rng.choice(w, wp, replace=False).tolist())
    wiring = PartialTransversalCX.from_permutation(controls, rng.permutation(wp).tolist())
    cc = CompiledCircuit(assemble(build_balanced_tree(w), build_balanced_tree(wp), wiring))
    n = int(rng.integers(1, 5))
    picks = rng.choice(len(cc.faults), n, replace=False)
    faults = [cc.faults[i] for i in picks]
    readout, data = naive_run(cc, faults)
    out = run_frames(cc, 1, injections={f.location: (np.array([0]), np.array([f.pauli])) for f in faults[:1]})
    single = naive_run(cc, faults[:1])
    assert out.ancilla[:, 0].astype(int).tolist() == single[0]
    accepted, k = inject(cc, faults)
    assert accepted == (len(set(readout)) <= 1)
    s = sum(data)
    assert k == min(s, w - s)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_frame_linearity(seed):
    rng = np.random.default_rng(seed)
    cc = CompiledCircuit(assemble(build_balanced_tree(8), build_balanced_tree(6), EQ1_PAIRS))
    i, j = rng.choice(len(cc.faults), 2, replace=False)
    a, b = cc.faults[i], cc.faults[j]
    if a.location == b.location:
        return
    singles = single_fault_outcomes(cc, [a, b])
    both = run_frames(cc, 1, injections={a.location: ([0], [a.pauli]), b.location: ([0], [b.pauli])})
    assert (both.data_x[:, 0] == singles.data_x[:, 0] ^ singles.data_x[:, 1]).all()
    assert (both.ancilla[:, 0] == singles.ancilla[:, 0] ^ singles.ancilla[:, 1]).all()


def test_flip_count_is_complement_symmetric():
    from catprep.sim.frame import FrameOutcome

    data = np.array([[1, 0], [1, 0], [0, 1], [1, 0], [1, 0]], dtype=bool)
    out = FrameOutcome(np.zeros((2, 2), dtype=bool), data)
    flipped = FrameOutcome(out.ancilla, ~data)
    assert out.flips.tolist() == flipped.flips.tolist() == [1, 1]


def test_seed_determinism_and_workers(eq1_circuit):
    nm = NoiseModel(0.01)
    a = estimate(eq1_circuit, nm, 150_000, seed=11)
    b = estimate(eq1_circuit, nm, 150_000, seed=11, workers=3)
    c = estimate(eq1_circuit, nm, 150_000, seed=12)
    assert a == b
    assert a != c
    assert report_csv([(4, a)]) == report_csv([(4, b)])


def test_acceptance_decreases_with_noise(ft3_w8):
    lo = estimate(ft3_w8, NoiseModel(0.001), 200_000, seed=1)
    hi = estimate(ft3_w8, NoiseModel(0.01), 200_000, seed=1)
    gap = lo.R_acc - hi.R_acc
    assert gap > 5 * math.hypot(lo.stderr, hi.stderr)


@pytest.mark.parametrize("init_error", ["flip", "phase"])
def test_monte_carlo_matches_expansion(ft3_w8, init_error):
    nm = NoiseModel(0.001, init_error)
    shots = 300_000
    mc = estimate(ft3_w8, nm, shots, seed=5)
    ex = low_order_expansion(ft3_w8, nm)
    assert ex.tail < 1e-3
    assert abs(mc.R_acc - ex.R_acc) <= expansion_tolerance(ex, shots)
    for k in (0, 1):
        assert abs(mc.P[k] - ex.P[k]) <= ex.tail / ex.R_acc + 4 * mc.P_stderr(k) + 1e-12


def test_expansion_orders_converge(ft3_w8):
    nm = NoiseModel(0.001)
    r0, r1, r2 = (low_order_expansion(ft3_w8, nm, order=o) for o in (0, 1, 2))
    assert r0.R_acc < r1.R_acc <= r2.R_acc + 1e-12
    assert r2.tail < r1.tail < r0.tail
    with pytest.raises(ValueError):
        low_order_expansion(ft3_w8, nm, order=3)


def test_phase_preparation_errors_are_harmless(ft3_w8):
    cc = CompiledCircuit(ft3_w8)
    init = [f for f in cc.noise_faults(NoiseModel(0.001, "phase")) if cc.locations[f.location].kind == "init"]
    out = single_fault_outcomes(cc, init)
    assert out.accepted.all()
    assert (out.flips == 0).all()


def test_single_faults_of_ft4_circuit_flip_at_most_one():
    cc = CompiledCircuit(synthesize(8, 4).circuit())
    out = single_fault_outcomes(cc)
    assert out.flips[out.accepted].max() <= 1


def test_exhaustive_injection_certified(ft3_w8):
    assert exhaustive_injection(ft3_w8, 3) == []
    assert exhaustive_injection(ft3_w8, 3, strict=True) == []


def test_exhaustive_injection_finds_identity_flaw():
    b8 = build_balanced_tree(8)
    c = assemble(b8, b8, PartialTransversalCX.identity(8))
    assert exhaustive_injection(c, 1) == []
    found = exhaustive_injection(c, 2)
    assert found and all(v.k > 2 for v in found)


def test_report_csv_layout(eq1_circuit):
    rep = estimate(eq1_circuit, NoiseModel(0.0), 10, seed=3)
    lines = report_csv([(4, rep)]).splitlines()
    assert lines[0] == "w,w_prime,t,p,shots,seed,R_acc,stderr,P_0,P_1,P_2,P_3,P_4"
    assert lines[1].startswith("8,6,4,0.0,10,3,1.000000,0.000000,1,0,")
