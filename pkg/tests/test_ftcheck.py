from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catprep import (
    CircuitError,
    PartialTransversalCX,
    PrepCircuit,
    build_balanced_tree,
    build_tables,
    check_permutation,
    fault_set,
    max_ft_order,
    oracle_check,
)
from catprep.ftcheck import Violation

from conftest import literal_violation, random_tree


def test_eq1_wiring_passes_t4(b8, eq1_wiring):
    assert oracle_check(b8, build_balanced_tree(6), eq1_wiring, 4) is None


def test_example2_permutation_passes_t4(b8, ex2_wiring):
    assert oracle_check(b8, b8, ex2_wiring, 4) is None


def test_identity_fails_t2_with_quad_witness(b8):
    v = oracle_check(b8, b8, PartialTransversalCX.identity(8), 2)
    assert v == Violation(e=0b1111, k=1, e_anc=0b1111, k_anc=1, weight=4, w=8, w_prime=8)
    assert v.to_record() == "violation e=0f k=1 e_anc=0f k_anc=1 weight=4"


def test_max_ft_order_values(b8, eq1_wiring, ex2_wiring):
    b6 = build_balanced_tree(6)
    assert max_ft_order(b8, b6, eq1_wiring, 5) == 5
    assert max_ft_order(b8, b6, eq1_wiring, 0) == 0
    assert max_ft_order(b8, b8, ex2_wiring, 6) == 6
    assert max_ft_order(b8, b8, PartialTransversalCX.identity(8), 4) == 1


def test_oracle_rejects_bad_wiring(b8):
    with pytest.raises(CircuitError):
        oracle_check(b8, build_balanced_tree(6), PartialTransversalCX.identity(5), 2)


def test_worked_example_permutations():
    data = fault_set(build_balanced_tree(6, spread=True), 2)
    ancilla = fault_set(build_balanced_tree(4), 1)
    tables = build_tables(data, ancilla, [0, 2, 3, 4], 2)
    v = check_permutation([1, 0, 3, 2], tables)
    assert v is not None and v.e == 0b000111
    assert check_permutation([0, 2, 1, 3], tables) is None


def test_check_permutation_requires_bijection():
    data = fault_set(build_balanced_tree(6, spread=True), 2)
    tables = build_tables(data, fault_set(build_balanced_tree(4), 1), [0, 2, 3, 4], 2)
    with pytest.raises(CircuitError):
        check_permutation([0, 0, 1, 2], tables)


@pytest.mark.parametrize("seed", range(6))
def test_oracle_matches_literal_definition(seed):
    rng = np.random.default_rng(seed)
    w = int(rng.integers(4, 8))
    wp = int(rng.integers(2, w + 1))
    data, anc = random_tree(rng, w), random_tree(rng, wp)
    controls = sorted(rng.choice(w, wp, replace=False).tolist())
    wiring = PartialTransversalCX.from_permutation(controls, rng.permutation(wp).tolist())
    for T in (1, 2, 3):
        expect = any(literal_violation(data, anc, wiring, T0) for T0 in range(1, T + 1))
        assert (oracle_check(data, anc, wiring, T) is not None) == expect


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_table_check_equals_oracle(seed):
    rng = np.random.default_rng(seed)
    w = int(rng.integers(4, 11))
    wp = int(rng.integers(2, w + 1))
    t = int(rng.integers(1, 4))
    data = build_balanced_tree(w) if rng.random() < 0.5 else random_tree(rng, w)
    anc = build_balanced_tree(wp) if rng.random() < 0.5 else random_tree(rng, wp)
    controls = sorted(rng.choice(w, wp, replace=False).tolist())
    sigma = rng.permutation(wp).tolist()
    tables = build_tables(fault_set(data, t), fault_set(anc, max(t - 1, 1)), controls, t)
    wiring = PartialTransversalCX.from_permutation(controls, sigma)
    assert (check_permutation(sigma, tables) is None) == (oracle_check(data, anc, wiring, t) is None)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_monotone_in_order(seed):
    rng = np.random.default_rng(seed)
    w = int(rng.integers(4, 11))
    wp = int(rng.integers(2, w + 1))
    data, anc = build_balanced_tree(w), build_balanced_tree(wp)
    controls = sorted(rng.choice(w, wp, replace=False).tolist())
    wiring = PartialTransversalCX.from_permutation(controls, rng.permutation(wp).tolist())
    verdicts = [oracle_check(data, anc, wiring, T) is None for T in range(1, 5)]
    assert verdicts == sorted(verdicts, reverse=True)
    top = max_ft_order(data, anc, wiring, 4)
    assert verdicts == [T <= top for T in range(1, 5)]


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_ancilla_relabeling_symmetry(seed):
    rng = np.random.default_rng(seed)
    w = int(rng.integers(4, 10))
    wp = int(rng.integers(2, w + 1))
    data, anc = build_balanced_tree(w), random_tree(rng, wp)
    tau = rng.permutation(wp).tolist()
    layers = tuple(tuple((tau[c], tau[t]) for c, t in layer) for layer in anc.layers)
    relabeled = PrepCircuit(wp, tau[anc.root], layers)
    controls = sorted(rng.choice(w, wp, replace=False).tolist())
    sigma = rng.permutation(wp).tolist()
    wiring = PartialTransversalCX.from_permutation(controls, sigma)
    moved = PartialTransversalCX.from_permutation(controls, [tau[s] for s in sigma])
    T = int(rng.integers(1, 4))
    assert (oracle_check(data, anc, wiring, T) is None) == (oracle_check(data, relabeled, moved, T) is None)
