from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catprep import PartialTransversalCX, build_balanced_tree, build_tables, fault_set, metrics, oracle_check
from catprep.errors import FormatError
from catprep.search import (
    SearchConfig,
    Solution,
    Status,
    SynthesisFailure,
    TableCache,
    ancilla_lower_bound,
    enumerate_controls,
    local_search,
    solve_cegar,
    solve_fixed_controls,
    solve_with_tables,
    subtree_constraints,
    synthesize,
)
from catprep.search.bounds import satisfies
from catprep.search.cegar import WiringEncoding, clause_satisfied
from catprep.search.local import default_iterations, repair

WORKED_CONTROLS = [0, 2, 3, 4]


@pytest.fixture(scope="module")
def worked_tables():
    data = fault_set(build_balanced_tree(6, spread=True), 2)
    return build_tables(data, fault_set(build_balanced_tree(4), 1), WORKED_CONTROLS, 2)


@pytest.mark.parametrize(
    "w, t, expect",
    [(8, 2, 4), (8, 3, 6), (8, 4, 6), (12, 3, 9), (16, 3, 12), (16, 7, 14), (18, 9, 15), (49, 4, 37)],
)
def test_lower_bound_values(w, t, expect):
    assert ancilla_lower_bound(build_balanced_tree(w), t).w_min == expect


@pytest.mark.parametrize("w", [8, 12, 16, 20, 32])
def test_lower_bound_three_quarters_rule(w):
    assert ancilla_lower_bound(build_balanced_tree(w), 3).w_min == 3 * w // 4


def test_enumerate_controls_complete():
    b8 = build_balanced_tree(8)
    cons = subtree_constraints(b8, 4)
    brute = [list(c) for c in itertools.combinations(range(8), 6) if satisfies(c, cons)]
    got = list(enumerate_controls(b8, 4, 6))
    assert len(got) == len(brute) == 16
    assert sorted(got) == brute
    assert list(enumerate_controls(b8, 4, 5)) == []


def test_cegar_finds_certified_wiring(b8):
    b6 = build_balanced_tree(6)
    res = solve_cegar(b8, b6, 6, 4)
    assert res.status is Status.SAT
    assert oracle_check(b8, b6, res.wiring, 4) is None


def test_cegar_proves_five_insufficient(b8):
    res = solve_cegar(b8, build_balanced_tree(5), 5, 4, structural=False)
    assert res.status is Status.UNSAT
    assert res.stats["refinements"] > 0
    structural = solve_cegar(b8, build_balanced_tree(5), 5, 4, structural=True)
    assert structural.status is Status.UNSAT


def test_cegar_unconstrained_first_iteration(b8):
    res = solve_cegar(b8, b8, 8, 1)
    assert res.status is Status.SAT
    assert res.stats["refinements"] == 0


def test_cegar_refinement_cap_times_out(b8):
    res = solve_cegar(b8, build_balanced_tree(5), 5, 4, budget=3)
    assert res.status is Status.TIMEOUT


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_blocking_clause_semantics(seed):
    rng = np.random.default_rng(seed)
    w = int(rng.integers(3, 9))
    wp = int(rng.integers(1, w + 1))
    enc = WiringEncoding(w, wp)
    controls = sorted(rng.choice(w, wp, replace=False).tolist())
    sigma = rng.permutation(wp).tolist()
    wiring = PartialTransversalCX.from_permutation(controls, sigma)
    e = int(rng.integers(0, 1 << w))
    g = wiring.image(e) if rng.random() < 0.5 else int(rng.integers(0, 1 << wp))
    clause = enc.blocking_clause(e, g)
    assert clause_satisfied(clause, enc.literals_of(controls, sigma)) == (wiring.image(e) != g)
    enc.close()


def test_fixed_worked_example(worked_tables):
    res = solve_with_tables(worked_tables)
    assert res.status is Status.SAT
    data = build_balanced_tree(6, spread=True)
    assert oracle_check(data, build_balanced_tree(4), res.wiring, 2) is None


def test_fixed_unsat_for_five_ancillas(b8):
    cache = TableCache(b8, build_balanced_tree(5), 4)
    for controls in itertools.combinations(range(8), 5):
        assert solve_fixed_controls(b8, build_balanced_tree(5), list(controls), 4, cache=cache).status is Status.UNSAT


def test_fixed_identity_first_when_unconstrained(b8):
    res = solve_fixed_controls(b8, b8, list(range(8)), 1)
    assert res.status is Status.SAT
    assert res.sigma == list(range(8))


def test_fixed_lazy_matches_upfront(b8):
    b6 = build_balanced_tree(6)
    cache = TableCache(b8, b6, 4)
    for controls in list(enumerate_controls(b8, 4, 6))[:6]:
        tables = cache.tables(controls)
        upfront = solve_with_tables(tables)
        lazy = solve_with_tables(tables, upfront_clauses=0)
        assert upfront.status is lazy.status
        for res in (upfront, lazy):
            if res.status is Status.SAT:
                assert oracle_check(b8, b6, res.wiring, 4) is None


def test_local_search_worked_example(worked_tables):
    n_iter = default_iterations(4, 2)
    for seed in range(100):
        res = repair(worked_tables, n_iter, seed)
        assert res.status is Status.SAT
        assert not worked_tables.violated(res.sigma).any()


def test_local_search_fails_on_unsat(b8):
    b5 = build_balanced_tree(5)
    cache = TableCache(b8, b5, 4)
    for controls in [[0, 2, 4, 6, 7], [1, 2, 3, 5, 6], [0, 1, 2, 3, 4]]:
        for seed in range(3):
            assert local_search(b8, b5, controls, 4, 50, seed, cache=cache).status is Status.FAIL


def test_local_search_zero_entries_is_immediate(b8):
    res = local_search(b8, b8, list(range(8)), 1, 1, seed=7)
    assert res.status is Status.SAT
    assert res.stats["iterations"] == 0


def test_local_search_seed_determinism(worked_tables):
    assert repair(worked_tables, 40, 5).sigma == repair(worked_tables, 40, 5).sigma


def test_synthesize_w8_t4():
    sol = synthesize(8, 4)
    assert sol.w_prime == 6
    m = metrics(sol.circuit())
    assert (m.depth_report, m.cx_count, m.qubit_count) == (5, 18, 14)


def test_synthesize_trivial():
    sol = synthesize(2, 1)
    assert (sol.w_prime, sol.certified) == (2, True)


def test_synthesize_reports_exhaustion():
    out = synthesize(8, 4, SearchConfig(t=4, w=8, w_prime_range=(5, 5)))
    assert isinstance(out, SynthesisFailure)
    assert not out
    assert out.proven_unsat == [5]
    assert "w'=5" in out.report()


@pytest.mark.parametrize("engines", [("fixed",), ("local",), ("cegar",)])
def test_synthesize_single_engine(engines):
    sol = synthesize(8, 3, SearchConfig(t=3, w=8, engines=engines))
    assert sol.w_prime == 6
    assert sol.engine == engines[0]


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(t=0, w=8)
    with pytest.raises(ValueError):
        SearchConfig(t=2, w=8, engines=("magic",))
    with pytest.raises(ValueError):
        SearchConfig(t=2, w=8, w_prime_range=(6, 9))


@given(
    st.integers(2, 30).flatmap(
        lambda w: st.tuples(st.just(w), st.integers(1, w), st.integers(1, 9), st.integers(0, 2**31), st.randoms())
    )
)
def test_solution_round_trip(args):
    w, wp, t, seed, rnd = args
    controls = sorted(rnd.sample(range(w), wp))
    targets = rnd.sample(range(wp), wp)
    sol = Solution(w, wp, t, controls, targets, "cegar", seed)
    back = Solution.from_text(sol.to_text())
    assert back == sol
    assert back.to_text() == sol.to_text()


@pytest.mark.parametrize(
    "text",
    [
        "w: 8\nw_prime: 6\n",
        "w: 8\nw_prime: 6\nt: 4\ncontrols: 0,1\ntargets: 0,1\nengine: x\nseed: 0\ncertified: true\n",
        "w: 8\nw_prime: six\nt: 4\ncontrols: \ntargets: \nengine: x\nseed: 0\ncertified: true\n",
        "w: 8\nbogus: 1\n",
        "just some text\n",
    ],
)
def test_solution_rejects_malformed(text):
    with pytest.raises(FormatError):
        Solution.from_text(text)
