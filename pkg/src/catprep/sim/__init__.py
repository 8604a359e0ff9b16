"""Pauli-frame simulation under circuit-level noise."""

from .estimate import SimReport, error_profile, estimate, report_csv
from .expansion import ExpansionReport, expansion_tolerance, low_order_expansion
from .frame import CompiledCircuit, Fault, FrameOutcome, Location, NoiseModel, inject, run_frames
from .injection import InjectionViolation, exhaustive_injection

__all__ = [
    "CompiledCircuit",
    "ExpansionReport",
    "Fault",
    "FrameOutcome",
    "InjectionViolation",
    "Location",
    "NoiseModel",
    "SimReport",
    "error_profile",
    "estimate",
    "exhaustive_injection",
    "expansion_tolerance",
    "inject",
    "low_order_expansion",
    "report_csv",
    "run_frames",
]
