"""Quantum-witness values, their violation bounds, and reference systems."""

from .witness import (
    Channel,
    DensityMatrix,
    InvariantViolation,
    MeasurementSet,
    WitnessReport,
    WitnessScenario,
    blind_measure,
    dimension_bound,
    entropic_witness,
    linear_entropy,
    optimal_final_projector,
    outcome_probability,
    saturating_scenario,
    simulated_witness,
    theoretical_bound,
    trace_distance,
    witness_probabilities,
    witness_value,
)

__version__ = "0.1.0"

__all__ = [
    "Channel",
    "DensityMatrix",
    "InvariantViolation",
    "MeasurementSet",
    "WitnessReport",
    "WitnessScenario",
    "blind_measure",
    "dimension_bound",
    "entropic_witness",
    "linear_entropy",
    "optimal_final_projector",
    "outcome_probability",
    "saturating_scenario",
    "simulated_witness",
    "theoretical_bound",
    "trace_distance",
    "witness_probabilities",
    "witness_value",
]
