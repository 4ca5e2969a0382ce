"""Resonances of Schottky surfaces and their covers."""

import json

from ._reslab import (
    NumericalError,
    ValidationError,
    class_sizes,
    critical_exponent,
    determinant,
    pressure,
    resonances,
    spectral_gap,
    test_function,
    validate,
)
from ._reslab import run as _run

__all__ = [
    "NumericalError",
    "ValidationError",
    "class_sizes",
    "critical_exponent",
    "determinant",
    "pressure",
    "resonances",
    "run",
    "spectral_gap",
    "test_function",
    "validate",
]


def run(config):
    """Run an experiment from a dict or JSON string; returns (status, summary, outputs)."""
    if not isinstance(config, str):
        config = json.dumps(config)
    return _run(config)
