"""Layered synthesis: sweep the ancilla width upward and try the engines in order."""

from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from ..circuits import build_balanced_tree
from ..ftcheck import oracle_check
from .bounds import ancilla_lower_bound, enumerate_controls
from .cegar import DEFAULT_REFINEMENT_CAP, solve_cegar
from .common import SearchResult, Status, TableCache
from .fixed import solve_with_tables
from .local import default_iterations, repair
from .solution import Solution

logger = logging.getLogger(__name__)

ENGINES = ("cegar", "fixed", "local")


@dataclass
class SearchConfig:
    """Budgets and ordering for :func:`synthesize`.

    All budgets are deterministic counts (clauses, conflicts, lazy rounds,
    iterations); ``time_limit`` is an optional wall-clock cap per CEGAR run.
    """

    t: int
    w: int
    w_prime_range: tuple[int, int] | None = None
    seed: int = 0
    engines: tuple[str, ...] = ENGINES
    cegar_refinements: int = DEFAULT_REFINEMENT_CAP
    cegar_conflicts: int | None = 200_000
    fixed_conflicts: int | None = 20_000
    fixed_rounds: int | None = 200
    max_control_sets: int = 64
    n_iter: int | None = None
    structural: bool = True
    time_limit: float | None = None
    fault_budget: int | None = None

    def __post_init__(self) -> None:
        if self.t < 1:
            raise ValueError("t must be at least 1")
        if self.w < 2:
            raise ValueError("w must be at least 2")
        unknown = set(self.engines) - set(ENGINES)
        if unknown:
            raise ValueError(f"unknown engines {sorted(unknown)}")
        if self.w_prime_range is not None:
            lo, hi = self.w_prime_range
            if not 2 <= lo <= hi <= self.w:
                raise ValueError(f"w' range {self.w_prime_range} not within [2, {self.w}]")


@dataclass(frozen=True)
class Outcome:
    w_prime: int
    engine: str
    status: str
    detail: str = ""


@dataclass
class SynthesisFailure:
    w: int
    t: int
    outcomes: list[Outcome] = field(default_factory=list)

    def __bool__(self) -> bool:
        return False

    @property
    def proven_unsat(self) -> list[int]:
        """Ancilla widths shown infeasible by a complete engine."""
        return sorted({o.w_prime for o in self.outcomes if o.status == "UNSAT" and o.engine in ("bound", "cegar", "fixed-all")})

    def report(self) -> str:
        lines = [f"no certified solution for w={self.w} t={self.t}"]
        lines.extend(f"  w'={o.w_prime} {o.engine}: {o.status} {o.detail}".rstrip() for o in self.outcomes)
        return "\n".join(lines)


def _local_seed(seed: int, w_prime: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, w_prime, index]).generate_state(1)[0])


def _certify(cache: TableCache, res: SearchResult, budget: int | None) -> bool:
    return oracle_check(cache.data, cache.ancilla, res.wiring, cache.t, budget=budget) is None


def synthesize(w: int, t: int, config: SearchConfig | None = None) -> Solution | SynthesisFailure:
    """Smallest-ancilla certified wiring for B_w at order ``t`` within the configured budgets.

    Returns a :class:`SynthesisFailure` listing every (w', engine) outcome when
    no width in range yields a certified solution.
    """
    cfg = config or SearchConfig(t=t, w=w)
    if (cfg.w, cfg.t) != (w, t):
        raise ValueError("config was built for a different (w, t)")
    data = build_balanced_tree(w)
    lb = ancilla_lower_bound(data, t).w_min
    lo, hi = cfg.w_prime_range or (max(2, lb), w)
    failure = SynthesisFailure(w, t)
    start = time.perf_counter()

    def emit(res: SearchResult, w_prime: int, seed: int) -> Solution:
        stats = {k: v for k, v in res.stats.items() if k != "clauses"}
        stats["wall_time"] = round(time.perf_counter() - start, 3)
        return Solution(w, w_prime, t, list(res.controls), list(res.sigma), res.engine, seed, True, stats)

    for w_prime in range(lo, hi + 1):
        if w_prime < lb:
            failure.outcomes.append(Outcome(w_prime, "bound", "UNSAT", f"lower bound {lb}"))
            continue
        ancilla = build_balanced_tree(w_prime)
        cache = TableCache(data, ancilla, t, cfg.fault_budget)
        if "cegar" in cfg.engines:
            res = solve_cegar(
                data,
                ancilla,
                w_prime,
                t,
                cfg.cegar_refinements,
                cache=cache,
                conflicts=cfg.cegar_conflicts,
                structural=cfg.structural,
                time_limit=cfg.time_limit,
            )
            detail = f"refinements={res.stats.get('refinements', 0)}"
            failure.outcomes.append(Outcome(w_prime, "cegar", res.status.value, detail))
            logger.info("w'=%d cegar %s (%s)", w_prime, res.status.value, detail)
            if res.status is Status.SAT:
                if _certify(cache, res, cfg.fault_budget):
                    return emit(res, w_prime, cfg.seed)
                failure.outcomes.append(Outcome(w_prime, "cegar", "UNCERTIFIED"))
            elif res.status is Status.UNSAT:
                continue
        if not {"fixed", "local"} & set(cfg.engines):
            continue
        controls_iter = enumerate_controls(data, t, w_prime)
        candidates = list(itertools.islice(controls_iter, cfg.max_control_sets))
        truncated = next(controls_iter, None) is not None
        all_unsat = True
        for idx, controls in enumerate(candidates):
            tables = cache.tables(controls)
            status = Status.TIMEOUT
            if "fixed" in cfg.engines:
                res = solve_with_tables(tables, conflicts=cfg.fixed_conflicts, max_rounds=cfg.fixed_rounds)
                status = res.status
                if status is Status.SAT and _certify(cache, res, cfg.fault_budget):
                    return emit(res, w_prime, cfg.seed)
            if status is Status.UNSAT:
                continue
            all_unsat = False
            if "local" in cfg.engines:
                seed = _local_seed(cfg.seed, w_prime, idx)
                res = repair(tables, cfg.n_iter or default_iterations(w_prime, t), seed)
                if res.status is Status.SAT and _certify(cache, res, cfg.fault_budget):
                    return emit(res, w_prime, cfg.seed)
        n = len(candidates)
        if all_unsat and not truncated and "fixed" in cfg.engines:
            failure.outcomes.append(Outcome(w_prime, "fixed-all", "UNSAT", f"{n} control sets"))
        else:
            failure.outcomes.append(Outcome(w_prime, "fixed+local", "FAIL", f"{n} control sets tried"))
    return failure
