"""Radial equilibrium envelopes, their measures, and comparisons."""
from .envelope import RadialProfile, Envelope, radial_envelope, envelope_from_kernel
from .measures import (
    RadialMeasure,
    CompatibilityError,
    MeasureComparison,
    radial_monge_ampere,
    geometric_measure,
    compare_measures,
)
from .io import save_profile, load_profile, save_measure, load_measure

__all__ = [
    "RadialProfile",
    "Envelope",
    "radial_envelope",
    "envelope_from_kernel",
    "RadialMeasure",
    "CompatibilityError",
    "MeasureComparison",
    "radial_monge_ampere",
    "geometric_measure",
    "compare_measures",
    "save_profile",
    "load_profile",
    "save_measure",
    "load_measure",
]
