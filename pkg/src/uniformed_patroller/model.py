"""Domain types for the uniformed patroller game on a star network.

The star has a center (the Patroller's base) and ``n`` end nodes. Once the
Attacker fixes an end node ``A``, the Patroller's Markov strategy lumps into a
three-state chain on ``{E, C, A}`` where ``E`` stands for any other end.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ValidationError",
    "GameConfig",
    "PatrollerStrategy",
    "AttackerStrategy",
    "SolveResult",
    "STATES",
    "reduced_transition",
    "validate",
    "conditional_center_prob",
    "center_prob_sequence",
]

#: Row/column order of :func:`reduced_transition`.
STATES = ("E", "C", "A")


class ValidationError(ValueError):
    """Raised when game or strategy parameters are outside their domain."""


@dataclass(frozen=True)
class GameConfig:
    """A game instance: ``n`` attackable end nodes, attack duration ``m``."""

    n: int
    m: int

    def __post_init__(self):
        _check_n(self.n)
        if isinstance(self.m, bool) or int(self.m) != self.m:
            raise ValidationError(f"m must be an integer, got {self.m!r}")
        if self.m < 2:
            raise ValidationError(f"m must be >= 2, got {self.m}")
        object.__setattr__(self, "m", int(self.m))


@dataclass(frozen=True)
class PatrollerStrategy:
    """Markov patrol on the star S_n.

    From the center the Patroller moves to each end with probability ``p``
    and stays with probability ``r = 1 - n*p``; from an end she returns to
    the center with probability ``s``.
    """

    n: int
    p: float
    s: float = 1.0
    r: float = field(init=False)
    q: float = field(init=False)

    def __post_init__(self):
        _check_n(self.n)
        p, s = float(self.p), float(self.s)
        if not p > 0.0:
            raise ValidationError(
                f"p must be > 0 (p = 0 leaves the Patroller at the center forever), got {p}")
        if p > 1.0 / self.n:
            raise ValidationError(f"p exceeds 1/n: p = {p} > 1/{self.n}")
        if not 0.0 < s <= 1.0:
            raise ValidationError(f"s must be in (0, 1], got {s}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "s", s)
        # n*fl(1/n) never exceeds 1 in binary64, so r >= 0 whenever p <= 1/n
        object.__setattr__(self, "r", 1.0 - self.n * p)
        object.__setattr__(self, "q", (self.n - 1) * p)


@dataclass(frozen=True)
class AttackerStrategy:
    """Wait for ``d`` consecutive absences at end node ``target``, then attack."""

    d: int = 2
    target: int = 1

    def __post_init__(self):
        if isinstance(self.d, bool) or int(self.d) != self.d or self.d < 1:
            raise ValidationError(f"d must be an integer >= 1, got {self.d!r}")
        if int(self.target) != self.target or self.target < 1:
            raise ValidationError(f"target must be an end-node index >= 1, got {self.target!r}")


@dataclass(frozen=True)
class SolveResult:
    """Optimal stationary patrol for one game instance.

    ``method`` is one of ``closed_m2``, ``closed_odd``, ``closed_m4`` or
    ``numeric``; ``diagnostics`` holds iteration counts, bracket widths and
    cross-check residuals.
    """

    n: int
    m: int
    p_hat: float
    value: float
    method: str
    diagnostics: dict = field(default_factory=dict, compare=False)
    r_hat: float = field(init=False)

    def __post_init__(self):
        if not 0.0 < self.p_hat <= 1.0 / self.n:
            raise ValidationError(f"p_hat = {self.p_hat} outside (0, 1/{self.n}]")
        object.__setattr__(self, "r_hat", 1.0 - self.n * self.p_hat)

    def as_dict(self) -> dict:
        return {"p_hat": self.p_hat, "r_hat": self.r_hat,
                "value": self.value, "method": self.method}


def _check_n(n):
    if isinstance(n, bool) or int(n) != n:
        raise ValidationError(f"n must be an integer, got {n!r}")
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")


def validate(config: GameConfig, strat: PatrollerStrategy) -> None:
    """Check that a game and a patrol strategy belong together.

    Both types already validate themselves on construction; this re-checks
    the combined instance (e.g. objects built with ``object.__new__``).
    """
    GameConfig.__post_init__(config)
    _check_n(strat.n)
    if strat.n != config.n:
        raise ValidationError(
            f"strategy is for n = {strat.n} but the game has n = {config.n}")
    if not strat.p > 0.0:
        raise ValidationError(f"p must be > 0, got {strat.p}")
    if strat.p > 1.0 / strat.n:
        raise ValidationError(f"p exceeds 1/n: p = {strat.p} > 1/{strat.n}")
    if not 0.0 < strat.s <= 1.0:
        raise ValidationError(f"s must be in (0, 1], got {strat.s}")


def reduced_transition(strat: PatrollerStrategy) -> np.ndarray:
    """Return the 3x3 transition matrix of the lumped chain over (E, C, A).

    ``A`` is made absorbing since only the first visit matters.
    """
    s, p, q, r = strat.s, strat.p, strat.q, strat.r
    return np.array([
        [1.0 - s, s, 0.0],
        [q, r, p],
        [0.0, 0.0, 1.0],
    ])


def conditional_center_prob(c: float, strat: PatrollerStrategy) -> float:
    """One-step update of P(at center | not at A).

    If the Patroller is at C with probability ``c`` (and otherwise at some
    other end) and is then observed to still be away from ``A``, she is at
    the center with probability ``(c*r + (1-c)*s) / (1 - p*c)``.
    """
    if not 0.0 <= c <= 1.0:
        raise ValidationError(f"c must be a probability, got {c}")
    if strat.p * c == 1.0:
        raise ValidationError("conditioning on not reaching A has probability zero (n = 1, p = 1, c = 1)")
    return (c * strat.r + (1.0 - c) * strat.s) / (1.0 - strat.p * c)


def center_prob_sequence(strat: PatrollerStrategy, d_max: int) -> list[float]:
    """Probabilities c(1), ..., c(d_max) of being at C after d periods away.

    Only defined for a reflecting patrol (``s == 1``); c(1) = 1 because the
    first period away from an end is always spent at the center.
    """
    if strat.s != 1.0:
        raise ValidationError("center_prob_sequence requires s == 1")
    if d_max < 1:
        raise ValidationError(f"d_max must be >= 1, got {d_max}")
    seq = [1.0]
    for _ in range(d_max - 1):
        seq.append(conditional_center_prob(seq[-1], strat))
    return seq
