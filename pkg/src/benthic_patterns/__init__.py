"""Steady-state and bifurcation analysis of a benthic bacteria-nutrient
reaction-diffusion model."""

from .kinetics import ParameterSet, StateVector, reaction, derivatives, bilinear_B, trilinear_C
from .homogeneous import (
    cubic_coefficients,
    homogeneous_states,
    classify_stability,
    dispersion,
    neutral_wavenumbers,
    critical_point,
    plane_scan,
    StabilityClass,
)

__version__ = "0.1.0"
