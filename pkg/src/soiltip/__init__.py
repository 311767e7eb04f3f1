"""Soil-carbon rate-induced tipping lab: model, inputs, integration and analysis."""

from .forcing import Forcing, ForcingKind, sech_pulse, tanh_shift
from .soil_model import RespirationKind, SoilParams, equilibrium

__all__ = [
    "Forcing",
    "ForcingKind",
    "RespirationKind",
    "SoilParams",
    "equilibrium",
    "sech_pulse",
    "tanh_shift",
]
__version__ = "0.1.0"
