"""Wigner functions of nonlinear coherent states of the Morse oscillator."""

from ._accel import BACKEND
from .errors import AccuracyError, ConsistencyError, CoverageError, DomainError, MorsewigError
from .morse import MorseSystem, make_system
from .states import BoundState, docs, dpacs, eigenstate, evolve, revival_period, solve_zeta_for_mean
from .wigner import (
    PhaseSpaceGrid,
    WignerConfig,
    auto_grid_spec,
    marginal_x,
    negativity,
    normalization,
    wigner_grid,
    wigner_point,
    wigner_point_closed,
    wigner_point_quadrature,
)

__version__ = "0.1.0"
