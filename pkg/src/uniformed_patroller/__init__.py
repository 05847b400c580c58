"""Exact and simulated solutions of the uniformed patroller game on star networks."""

from .formulas import q_general
from .hitting import interception_for_delay, pmf_matrix_power
from .model import (
    AttackerStrategy,
    GameConfig,
    PatrollerStrategy,
    SolveResult,
    ValidationError,
)
from .solver import best_delay, solve, verify_equilibrium

__all__ = [
    "AttackerStrategy",
    "GameConfig",
    "PatrollerStrategy",
    "SolveResult",
    "ValidationError",
    "best_delay",
    "interception_for_delay",
    "pmf_matrix_power",
    "q_general",
    "solve",
    "verify_equilibrium",
]

__version__ = "0.1.0"
