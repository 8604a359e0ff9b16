"""Fault-tolerant cat-state preparation with a verified partial transversal CNOT."""

from .circuits import (
    CircuitMetrics,
    PartialTransversalCX,
    PrepCircuit,
    VerifiedPrepCircuit,
    assemble,
    build_balanced_tree,
    build_from_tree,
    metrics,
)
from .errors import CircuitError, FormatError, ResourceError
from .faults import FaultSet, FaultTables, build_tables, fault_set, project, representatives, single_fault_set
from .ftcheck import Violation, check_permutation, max_ft_order, oracle_check

__version__ = "0.1.0"

__all__ = [
    "CircuitError",
    "CircuitMetrics",
    "FaultSet",
    "FaultTables",
    "FormatError",
    "PartialTransversalCX",
    "PrepCircuit",
    "ResourceError",
    "VerifiedPrepCircuit",
    "Violation",
    "assemble",
    "build_balanced_tree",
    "build_from_tree",
    "build_tables",
    "check_permutation",
    "fault_set",
    "max_ft_order",
    "metrics",
    "oracle_check",
    "project",
    "representatives",
    "single_fault_set",
]
