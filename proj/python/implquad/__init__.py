"""Positive-weight quadrature rules built from sample data, with fatigue load aggregation."""

from ._core import (
    ImplquadError,
    QuadratureRule,
    SampleSet,
    aggregate,
    balance_seeds,
    bin_samples,
    build_sequence,
    check_moments,
    cli,
    construct_implicit_rule,
    equivalent_load,
    load_samples,
    misalignment,
    rainflow,
    rule_to_json,
    run_genz,
    sigma1,
    synthesize,
    uniform_seeds,
)

__version__ = "0.1.0"

__all__ = [
    "ImplquadError",
    "QuadratureRule",
    "SampleSet",
    "aggregate",
    "balance_seeds",
    "bin_samples",
    "build_sequence",
    "check_moments",
    "cli",
    "construct_implicit_rule",
    "equivalent_load",
    "load_samples",
    "misalignment",
    "rainflow",
    "rule_to_json",
    "run_genz",
    "sigma1",
    "synthesize",
    "uniform_seeds",
]
