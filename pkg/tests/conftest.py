from __future__ import annotations

import itertools

import pytest

from catprep import PartialTransversalCX, PrepCircuit, build_balanced_tree

# 0-based wirings of the worked w=8 examples
EQ1_PAIRS = ((1, 2), (2, 5), (3, 0), (5, 4), (6, 3), (7, 1))
EX2_SIGMA = (0, 4, 2, 6, 1, 5, 7, 3)


@pytest.fixture(scope="session")
def b8() -> PrepCircuit:
    return build_balanced_tree(8)


@pytest.fixture(scope="session")
def b6() -> PrepCircuit:
    return build_balanced_tree(6)


@pytest.fixture(scope="session")
def eq1_wiring() -> PartialTransversalCX:
    return PartialTransversalCX(EQ1_PAIRS)


@pytest.fixture(scope="session")
def ex2_wiring() -> PartialTransversalCX:
    return PartialTransversalCX.from_permutation(range(8), EX2_SIGMA)


def location_faults(c: PrepCircuit) -> list[int]:
    """Independent enumeration: one X at every (qubit, time step) slot, propagated gate by gate."""
    gates = c.cnots
    out = []
    for start in range(len(gates) + 1):
        for q in range(c.width):
            if start == 0 and q == c.root:
                continue
            e = 1 << q
            for ctl, tgt in gates[start:]:
                if (e >> ctl) & 1:
                    e ^= 1 << tgt
            out.append(e)
    return out


def brute_fault_set(c: PrepCircuit, t: int) -> set[int]:
    locs = location_faults(c)
    out = {0}
    for r in range(1, t + 1):
        for combo in itertools.combinations(range(len(locs)), r):
            e = 0
            for i in combo:
                e ^= locs[i]
            out.add(e)
    return out


def literal_violation(data: PrepCircuit, ancilla: PrepCircuit, wiring: PartialTransversalCX, T: int) -> bool:
    """Direct transcription of the FT definition at exactly order T, over location-level fault sets."""
    w, wp = data.width, ancilla.width
    full_a = (1 << wp) - 1
    D = {k: brute_fault_set(data, k) for k in range(T + 1)}
    A = {k: brute_fault_set(ancilla, k) for k in range(T + 1)}
    for k in range(T + 1):
        for e in D[k]:
            if min(bin(e).count("1"), w - bin(e).count("1")) <= T:
                continue
            f = wiring.image(e)
            for e2 in A[T - k]:
                if f ^ e2 in (0, full_a):
                    return True
    return False


def random_tree(rng, w: int, binary: bool = True) -> PrepCircuit:
    from catprep import build_from_tree

    parent = [-1]
    for q in range(1, w):
        choices = [p for p in range(q) if not binary or parent.count(p) < 2 - (p == 0) + 1]
        parent.append(int(rng.choice(choices)))
    return build_from_tree(parent)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
