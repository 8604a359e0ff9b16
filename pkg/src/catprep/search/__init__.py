"""Synthesis engines for fault-tolerant partial transversal CNOTs."""

from .bounds import LowerBound, SubtreeConstraint, ancilla_lower_bound, enumerate_controls, subtree_constraints
from .cegar import solve_cegar
from .common import SearchResult, Status, TableCache
from .fixed import solve_fixed_controls, solve_with_tables
from .local import local_search
from .solution import Solution
from .synth import Outcome, SearchConfig, SynthesisFailure, synthesize

__all__ = [
    "LowerBound",
    "Outcome",
    "SearchConfig",
    "SearchResult",
    "Solution",
    "Status",
    "SubtreeConstraint",
    "SynthesisFailure",
    "TableCache",
    "ancilla_lower_bound",
    "enumerate_controls",
    "local_search",
    "solve_cegar",
    "solve_fixed_controls",
    "solve_with_tables",
    "subtree_constraints",
    "synthesize",
]
