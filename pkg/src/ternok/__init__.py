"""One-dimensional minimizers of the sharp-interface ternary Ohta-Kawasaki energy."""
__version__ = "0.1.0"

from .energy import EnergyBreakdown, ModelParams, free_energy
from .optimizer import OptimizerOptions, optimize_repeats, optimize_widths
from .pattern import InvalidPattern, canonicalize, enumerate_patterns, validate

__all__ = [
    "EnergyBreakdown", "ModelParams", "free_energy",
    "OptimizerOptions", "optimize_repeats", "optimize_widths",
    "InvalidPattern", "canonicalize", "enumerate_patterns", "validate",
]
