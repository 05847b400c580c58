"""What wearing a uniform costs the Patroller.

Compares the game value ``V`` (Attacker sees the Patroller at his location)
with the value ``V~`` of the same game without that observation. ``V~`` is
only available for m = 2 and odd m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import GameConfig, ValidationError
from .solver import solve

__all__ = ["UniformCost", "value_non_uniformed", "uniform_cost"]


@dataclass(frozen=True)
class UniformCost:
    value: float
    value_non_uniformed: float
    ratio: float
    relative_loss: float

    def as_dict(self) -> dict:
        return {"V": self.value, "V_tilde": self.value_non_uniformed,
                "ratio": self.ratio, "relative_loss": self.relative_loss}


def _miss(n: int, j: int) -> float:
    """1 - ((n - 1)/n)**j without cancellation."""
    if n == 1:
        return 1.0 if j > 0 else 0.0
    return -math.expm1(j * math.log1p(-1.0 / n))


def value_non_uniformed(config: GameConfig) -> float:
    """Value of the game when the Patroller cannot be observed.

    For m = 2 any two consecutive periods contain one end visit, so the value
    is 1/n. For m = 2j + 1 the random walk and the Attacker's start are each
    in one of two phases with probability 1/2, giving the average of
    ``1 - ((n-1)/n)**j`` and ``1 - ((n-1)/n)**(j+1)``.
    """
    n, m = config.n, config.m
    if m == 2:
        return 1.0 / n
    if m % 2 == 0:
        raise ValidationError(f"non-uniformed value undefined for even m>=4 (m = {m})")
    j = (m - 1) // 2
    return 0.5 * _miss(n, j) + 0.5 * _miss(n, j + 1)


def uniform_cost(config: GameConfig) -> UniformCost:
    v_tilde = value_non_uniformed(config)
    v = solve(config).value
    return UniformCost(v, v_tilde, v / v_tilde, (v_tilde - v) / v_tilde)
