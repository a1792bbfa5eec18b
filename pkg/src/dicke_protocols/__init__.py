"""Simulation of the Dicke-state protocols on the symmetric subspace.

States live in the (n+1)-dimensional Dicke basis; :mod:`oracle` provides the
dense 2^n reference used to cross-check everything else.
"""
from .algebra import ANNIHILATED, GateParams, SymmetryCoeffs
from .dicke_space import DickeIndex, SymmetricState, dicke_state, fidelity, inner_product, normalize, vacuum
from .errors import (
    DegenerateRunError,
    DegenerateStateError,
    DickeError,
    DimensionError,
    DomainError,
    NonPhysicalGateError,
    NumericError,
    SizeError,
    SpectralError,
)
from .krawtchouk import KrawtchoukParams, krawtchouk, krawtchouk_row
from .preparation import PreparationSchedule, compile_schedule, run_schedule
from .protocols import IterationLog, ProtocolOutcome, make_rng
from .spectral import Angles, FixedPointBasis, build_fixed_point_basis

__all__ = [
    "ANNIHILATED",
    "Angles",
    "DegenerateRunError",
    "DegenerateStateError",
    "DickeError",
    "DickeIndex",
    "DimensionError",
    "DomainError",
    "FixedPointBasis",
    "GateParams",
    "IterationLog",
    "KrawtchoukParams",
    "NonPhysicalGateError",
    "NumericError",
    "PreparationSchedule",
    "ProtocolOutcome",
    "SizeError",
    "SpectralError",
    "SymmetricState",
    "SymmetryCoeffs",
    "build_fixed_point_basis",
    "compile_schedule",
    "dicke_state",
    "fidelity",
    "inner_product",
    "krawtchouk",
    "krawtchouk_row",
    "make_rng",
    "normalize",
    "run_schedule",
    "vacuum",
]
