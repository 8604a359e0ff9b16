"""Monte Carlo estimates of the acceptance rate and the post-selected flip histogram."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..circuits import VerifiedPrepCircuit
from .frame import CompiledCircuit, NoiseModel, run_frames

BLOCK = 1 << 16


@dataclass(frozen=True)
class SimReport:
    w: int
    w_prime: int
    p: float
    shots: int
    seed: int
    accepted: int
    counts: tuple[int, ...]  # accepted shots with k = 0..floor(w/2) flips

    @property
    def R_acc(self) -> float:
        return self.accepted / self.shots

    @property
    def stderr(self) -> float:
        r = self.R_acc
        return math.sqrt(r * (1.0 - r) / self.shots)

    @property
    def P(self) -> tuple[float, ...]:
        """Normalized histogram over accepted shots (all zeros if none accepted)."""
        if self.accepted == 0:
            return tuple(0.0 for _ in self.counts)
        return tuple(c / self.accepted for c in self.counts)

    def P_stderr(self, k: int) -> float:
        if self.accepted == 0:
            return 0.0
        q = self.P[k]
        return math.sqrt(q * (1.0 - q) / self.accepted)


def _block_seed(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))


def _run_block(cc: CompiledCircuit, nm: NoiseModel, seed: int, block: int, size: int) -> tuple[int, np.ndarray]:
    out = run_frames(cc, size, nm=nm, rng=_block_seed(seed, block))
    acc = out.accepted
    k = out.flips[acc]
    hist = np.bincount(k, minlength=cc.w // 2 + 1)
    return int(acc.sum()), hist


def estimate(
    c: VerifiedPrepCircuit | CompiledCircuit,
    nm: NoiseModel,
    shots: int,
    seed: int = 0,
    *,
    workers: int = 1,
) -> SimReport:
    """Aggregate ``shots`` noisy runs.

    Shots are split into fixed blocks of 65536, each with its own stream
    derived from (seed, block index), so the report is identical for any
    ``workers`` count.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    cc = c if isinstance(c, CompiledCircuit) else CompiledCircuit(c)
    sizes = [min(BLOCK, shots - s) for s in range(0, shots, BLOCK)]
    jobs = [(cc, nm, seed, b, n) for b, n in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda a: _run_block(*a), jobs))
    else:
        results = [_run_block(*a) for a in jobs]
    accepted = sum(r[0] for r in results)
    hist = np.sum([r[1] for r in results], axis=0)
    return SimReport(cc.w, cc.w_prime, nm.p, shots, seed, accepted, tuple(int(x) for x in hist))


def error_profile(c, nm: NoiseModel, shots: int, seed: int = 0, *, workers: int = 1) -> tuple[float, ...]:
    """Post-selected probabilities P_k of k data flips, k = 0..floor(w/2)."""
    return estimate(c, nm, shots, seed, workers=workers).P


CSV_HEADER_BASE = ["w", "w_prime", "t", "p", "shots", "seed", "R_acc", "stderr"]


def report_csv(reports: list[tuple[int, SimReport]]) -> str:
    """CSV rows for (t, report) pairs; P columns run to the largest floor(w/2)."""
    kmax = max((len(r.counts) for _, r in reports), default=1)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(CSV_HEADER_BASE + [f"P_{k}" for k in range(kmax)])
    for t, r in reports:
        P = list(r.P) + [0.0] * (kmax - len(r.counts))
        wr.writerow([r.w, r.w_prime, t, repr(r.p), r.shots, r.seed, f"{r.R_acc:.6f}", f"{r.stderr:.6f}"] + [f"{q:.8g}" for q in P])
    return buf.getvalue()
