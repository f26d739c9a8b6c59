"""Stable configuration structures and forward/reverse bisimulation checking."""

from .core import (AutoConcurrencyReport, CapacityError, CausalContext, ConfigStructure,
                   InputError, NotStableError, ValidationReport, auto_concurrency, causality,
                   depths, lift, minimal_events, slice_depths, slice_geq, slice_leq, validate)
from .equivalences import (ALL_KINDS, Kind, Relation, Verdict, WitnessTree, check, check_all,
                           maximal_bisimulation, replay_witness, verify_relation)
from .terms import parse, translate

__all__ = [
    "ALL_KINDS", "AutoConcurrencyReport", "CapacityError", "CausalContext", "ConfigStructure",
    "InputError", "Kind", "NotStableError", "Relation", "ValidationReport", "Verdict",
    "WitnessTree", "auto_concurrency", "causality", "check", "check_all", "depths", "lift",
    "maximal_bisimulation", "minimal_events", "parse", "replay_witness", "slice_depths",
    "slice_geq", "slice_leq", "translate", "validate", "verify_relation",
]
