"""Hitting time of the attacked node for the lumped {E, C, A} chain.

Time 0 is the first period the Patroller is away from the attacked end ``A``
(she is surely at the center), and ``T_C`` is the first ``k >= 1`` at which
she is back at ``A``. So ``P(T_C = 1) = p`` for every strategy.

Three independent routes to the distribution are provided:

* :func:`pmf_matrix_power` iterates the 2x2 substochastic block over
  ``{E, C}``; valid for every reflection probability ``s``.
* :func:`pmf_closed_form` uses the characteristic roots ``w1, w2`` of the
  reflecting (``s = 1``) chain.
* :func:`pgf_T_C` / :func:`pgf_coefficients` go through the two non-unit
  eigenvalues and the birth-death product form of the generating function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import GameConfig, PatrollerStrategy, ValidationError, validate

__all__ = [
    "HittingTimeDistribution",
    "SpectralData",
    "pmf_matrix_power",
    "pmf_closed_form",
    "eigenvalues",
    "pgf_T_C",
    "pgf_coefficients",
    "prob_hit_within",
    "interception_for_delay",
    "DEFAULT_TAIL_TOL",
    "MAX_AUTO_HORIZON",
    "MAX_HORIZON",
]

DEFAULT_TAIL_TOL = 1e-15
MAX_AUTO_HORIZON = 10**6
# explicit horizons above this would need > ~250 MB for pmf + tail arrays
MAX_HORIZON = 10**7


@dataclass(frozen=True)
class HittingTimeDistribution:
    """Truncated law of a hitting time on ``{1, ..., K}``.

    ``pmf[k-1] = P(T = k)`` for ``k = 1..K`` and ``tail[k-1] = P(T >= k)``
    for ``k = 1..K+1``; ``truncated_mass = P(T > K)``.
    """

    pmf: np.ndarray
    tail: np.ndarray
    K: int
    truncated_mass: float

    def prob(self, k: int) -> float:
        if not 1 <= k <= self.K:
            raise IndexError(f"k = {k} outside 1..{self.K}")
        return float(self.pmf[k - 1])

    def tail_at(self, k: int) -> float:
        """P(T >= k) for ``1 <= k <= K + 1``."""
        if not 1 <= k <= self.K + 1:
            raise IndexError(f"k = {k} outside 1..{self.K + 1}")
        return float(self.tail[k - 1])

    def cdf(self, k: int) -> float:
        """P(T <= k)."""
        return float(self.pmf[:k].sum()) if k >= 1 else 0.0


@dataclass(frozen=True)
class SpectralData:
    """Non-unit eigenvalues of the lumped chain and the reflecting-chain roots.

    ``w1 <= w2`` solve ``z**2 - r*z - q = 0``; for ``s = 1`` they coincide
    with ``theta_minus`` and ``theta_plus``.
    """

    theta_minus: float
    theta_plus: float
    u: float
    w1: float
    w2: float


def _start_vector(start: str) -> tuple[float, float]:
    if start == "C":
        return 0.0, 1.0
    if start == "E":
        return 1.0, 0.0
    raise ValidationError(f"start must be 'C' or 'E', got {start!r}")


def pmf_matrix_power(strat: PatrollerStrategy, K: int | None = None, *,
                     start: str = "C", tail_tol: float = DEFAULT_TAIL_TOL
                     ) -> HittingTimeDistribution:
    """Exact distribution of the hitting time of ``A`` by forward iteration.

    Parameters
    ----------
    strat : PatrollerStrategy
        Any valid strategy; ``s < 1`` is fine.
    K : int, optional
        Horizon. By default the smallest ``K`` with ``P(T > K) < tail_tol``,
        capped at ``MAX_AUTO_HORIZON``.
    start : {"C", "E"}
        State occupied at time 0.
    """
    if K is not None:
        if K < 1:
            raise ValidationError(f"K must be >= 1, got {K}")
        if K > MAX_HORIZON:
            raise ValidationError(
                f"K = {K} exceeds the memory budget of {MAX_HORIZON} steps")
    p, q, r, s = strat.p, strat.q, strat.r, strat.s
    stay_e = 1.0 - s
    e, c = _start_vector(start)
    pmf, tail = [], [1.0]
    limit = K if K is not None else MAX_AUTO_HORIZON
    for _ in range(limit):
        pmf.append(c * p)
        e, c = e * stay_e + c * q, e * s + c * r
        survive = e + c
        tail.append(survive)
        if K is None and survive < tail_tol:
            break
    return HittingTimeDistribution(
        pmf=np.asarray(pmf), tail=np.asarray(tail), K=len(pmf),
        truncated_mass=tail[-1])


def eigenvalues(strat: PatrollerStrategy) -> SpectralData:
    n, p, s, r, q = strat.n, strat.p, strat.s, strat.r, strat.q
    np_ = n * p
    # (s + np)^2 - 4ps >= (s - np)^2 >= 0 because n >= 1
    root = math.sqrt(max((s + np_) ** 2 - 4.0 * p * s, 0.0))
    theta_minus = 0.5 * (2.0 - s - np_ - root)
    theta_plus = 0.5 * (2.0 - s - np_ + root)
    u = math.sqrt(max((np_ + 1.0) ** 2 - 4.0 * p, 0.0))
    w2 = 0.5 * (r + u)
    # Vieta keeps w1 sign-exact where r - u would cancel
    w1 = -q / w2 if w2 > 0.0 else 0.5 * (r - u)
    return SpectralData(theta_minus, theta_plus, u, w1, w2)


def pmf_closed_form(strat: PatrollerStrategy, k: int) -> float:
    """P(T_C = k) = p (w2**k - w1**k) / u for the reflecting patrol."""
    if strat.s != 1.0:
        raise ValidationError("closed-form pmf needs s == 1; use pmf_matrix_power")
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    sd = eigenvalues(strat)
    if sd.u < 1e-14:
        raise ValidationError("repeated characteristic root (n = 1, p = 1); use pmf_matrix_power")
    return strat.p * (sd.w2 ** k - sd.w1 ** k) / sd.u


def pgf_T_C(strat: PatrollerStrategy, z: float) -> float:
    """Generating function E[z**T_C] for ``|z| < 1``."""
    if not abs(z) < 1.0:
        raise ValidationError(f"|z| must be < 1, got {z}")
    p, s = strat.p, strat.s
    if s == 1.0:
        den = 1.0 - z * strat.r - z * z * strat.q
        if abs(den) < 1e-12:
            raise ValidationError(f"z = {z} is too close to a pole")
        return p * z / den
    sd = eigenvalues(strat)
    # one factor of z from the product cancels the 1/z of the quotient
    out = z * (1.0 - (1.0 - s) * z) / s
    for theta in (sd.theta_minus, sd.theta_plus):
        den = 1.0 - theta * z
        if abs(den) < 1e-12:
            raise ValidationError(f"z = {z} is too close to a pole")
        out *= (1.0 - theta) / den
    return out


def pgf_coefficients(strat: PatrollerStrategy, K: int) -> np.ndarray:
    """Taylor coefficients ``[z**1 .. z**K]`` of the generating function.

    Expands the eigenvalue product form by power-series division, so it does
    not share any arithmetic with the transition-matrix iteration.
    """
    s = strat.s
    sd = eigenvalues(strat)
    t_sum = sd.theta_minus + sd.theta_plus
    t_prod = sd.theta_minus * sd.theta_plus
    lead = (1.0 - sd.theta_minus) * (1.0 - sd.theta_plus)
    # numerator (1 - (1-s) z) * lead * z, denominator s (1 - t_sum z + t_prod z^2)
    num = {1: lead, 2: -(1.0 - s) * lead}
    g = np.zeros(K + 1)
    for k in range(1, K + 1):
        acc = num.get(k, 0.0) + s * t_sum * g[k - 1]
        if k >= 2:
            acc -= s * t_prod * g[k - 2]
        g[k] = acc / s
    return g[1:]


def prob_hit_within(strat: PatrollerStrategy, steps: int, start: str = "C") -> float:
    """P(the chain started at ``start`` reaches ``A`` within ``steps`` moves)."""
    if steps <= 0:
        return 0.0
    return pmf_matrix_power(strat, steps, start=start).cdf(steps)


def interception_for_delay(config: GameConfig, strat: PatrollerStrategy, d: int) -> float:
    """Exact interception probability against an Attacker with delay ``d``.

    The attack starts at time ``d - 1`` (the d-th consecutive absence) and
    covers times ``d-1 .. d+m-2``, so it is intercepted iff
    ``d <= T_C <= d + m - 2``. Returns ``P(that | T_C >= d)``.
    """
    validate(config, strat)
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise ValidationError(f"d must be an integer >= 1, got {d!r}")
    p, q, r, s = strat.p, strat.q, strat.r, strat.s
    stay_e = 1.0 - s
    e, c = 0.0, 1.0
    for _ in range(d - 1):
        e, c = e * stay_e + c * q, e * s + c * r
    survive = e + c
    if survive < 1e-300:
        raise ValidationError(
            f"P(T_C >= {d}) = {survive:.3g}: the attack (almost) never starts")
    hit = 0.0
    for _ in range(config.m - 1):
        hit += c * p
        e, c = e * stay_e + c * q, e * s + c * r
    return min(hit / survive, 1.0)
