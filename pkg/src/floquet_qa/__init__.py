"""Adiabaticity conditions for periodically driven quantum systems."""

from .conditions import ConditionReport, Threshold, analyze
from .errors import (
    DegenerateQuasienergies,
    DegenerateSpectrum,
    FloquetQAError,
    InvalidParameter,
    NumericalFailure,
    PropagationFailure,
)
from .floquet import FloquetDecomposition, decompose
from .models import (
    PeriodicHamiltonian,
    SchwingerRabiParams,
    TwoToneParams,
    build_dual,
    build_generic,
    build_schwinger_rabi,
    build_two_tone,
)
from .propagator import IntegratorConfig, monodromy, propagate

__version__ = "0.1.0"
