"""Helpers for F2 error vectors stored as Python ints.

Bit ``i`` of an integer mask is the X component on qubit ``i`` (0-based).
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np


def full_mask(n: int) -> int:
    return (1 << n) - 1


def popcount(e: int) -> int:
    return int(e).bit_count()


def weight(e: int, n: int) -> int:
    """Weight of an X error on an ``n``-qubit cat state, modulo the X^n stabilizer."""
    p = popcount(e)
    return min(p, n - p)


def complement(e: int, n: int) -> int:
    return e ^ full_mask(n)


def canonical(e: int, n: int) -> int:
    """Smaller of ``e`` and its complement; a key for the stabilizer class of ``e``."""
    return min(e, e ^ full_mask(n))


def from_bits(bits: Sequence[int]) -> int:
    """``[1, 0, 1]`` -> qubits 0 and 2 set."""
    out = 0
    for i, b in enumerate(bits):
        if b:
            out |= 1 << i
    return out


def to_bits(e: int, n: int) -> list[int]:
    return [(e >> i) & 1 for i in range(n)]


def from_support(qubits: Iterable[int]) -> int:
    out = 0
    for q in qubits:
        out |= 1 << q
    return out


def support(e: int) -> list[int]:
    out = []
    i = 0
    while e:
        if e & 1:
            out.append(i)
        e >>= 1
        i += 1
    return out


def to_hex(e: int, n: int) -> str:
    return format(e, f"0{max(1, (n + 3) // 4)}x")


def lex_key(e: int, n: int) -> tuple[int, ...]:
    """Sort key matching the lexicographic order of ``to_bits(e, n)``."""
    return tuple(to_bits(e, n))


# Vectorized variants operating on uint64 arrays.


def popcount_array(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a.astype(np.uint64)).astype(np.int64)


def weight_array(a: np.ndarray, n: int) -> np.ndarray:
    p = popcount_array(a)
    return np.minimum(p, n - p)


def project_array(a: np.ndarray, positions: Sequence[int]) -> np.ndarray:
    """Gather bits ``positions[j]`` of each mask into bit ``j`` of the result."""
    a = a.astype(np.uint64, copy=False)
    out = np.zeros(a.shape, dtype=np.uint64)
    one = np.uint64(1)
    for j, q in enumerate(positions):
        out |= ((a >> np.uint64(q)) & one) << np.uint64(j)
    return out


def scatter_array(a: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    """Move bit ``j`` of each mask to bit ``targets[j]``."""
    a = a.astype(np.uint64, copy=False)
    out = np.zeros(a.shape, dtype=np.uint64)
    one = np.uint64(1)
    for j, q in enumerate(targets):
        out |= ((a >> np.uint64(j)) & one) << np.uint64(q)
    return out


def lex_key_array(a: np.ndarray, n: int) -> np.ndarray:
    """Bit-reversal within ``n`` bits; integer order equals lexicographic bit-list order."""
    return project_array(a, list(range(n - 1, -1, -1)))
