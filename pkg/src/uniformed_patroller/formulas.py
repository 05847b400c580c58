"""Closed-form interception probabilities and optima.

All formulas assume the equilibrium play ``s = 1`` and ``d = 2`` unless a
reflection probability is passed explicitly (``q_m4``).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .model import GameConfig, PatrollerStrategy, SolveResult, ValidationError

__all__ = [
    "q_m2",
    "solve_m2",
    "value_odd",
    "q_m4",
    "q_m4_poly",
    "m4_quartic",
    "M4Constants",
    "m4_constants",
    "phat_m4",
    "phat_m4_numeric",
    "asymptotics_m4",
    "q_general",
    "h_recursion",
    "q_from_recursion",
    "q_and_slope",
]

log = logging.getLogger(__name__)


def _strategy(n, p, s=1.0):
    return PatrollerStrategy(n, p, s)


def q_m2(n: int, p: float) -> float:
    """Interception probability for m = 2: ``(1 - n p) p / (1 - p)``."""
    st = _strategy(n, p)
    if st.p == 1.0:  # n = 1, p = 1: limit of (1 - p) p / (1 - p)
        return 1.0
    return st.r * st.p / (1.0 - st.p)


def solve_m2(n: int) -> SolveResult:
    """Optimal patrol and value for m = 2.

    Uses the cancellation-free forms ``p = (1/n) / (1 + sqrt(1 - 1/n))`` and
    ``V = 1 / ((2n - 1) + 2 sqrt(n (n - 1)))``.
    """
    GameConfig(n, 2)
    root = math.sqrt(n * (n - 1.0))
    p_hat = (1.0 / n) / (1.0 + math.sqrt(1.0 - 1.0 / n))
    value = 1.0 / ((2.0 * n - 1.0) + 2.0 * root)
    return SolveResult(n, 2, p_hat, value, "closed_m2")


def value_odd(n: int, m: int) -> SolveResult:
    """Odd attack duration: the zero-holding random walk ``p = 1/n`` is optimal."""
    GameConfig(n, m)
    if m % 2 == 0:
        raise ValidationError(f"value_odd needs odd m, got {m}")
    j = (m - 1) // 2
    value = -math.expm1(j * math.log1p(-1.0 / n)) if n > 1 else 1.0
    return SolveResult(n, m, 1.0 / n, value, "closed_odd")


def q_m4(n: int, p: float, s: float = 1.0) -> float:
    """Interception probability for m = 4 against delay 2.

    Enumerates the intercepting paths over the four attack periods: from C,
    ``CA``, ``CCA``, ``CCCA``, ``CECA``; from another end, ``ECA``, ``ECCA``,
    ``EECA``. The start is at C with probability ``r / (1 - p)``.
    """
    st = _strategy(n, p, s)
    p, q, r, s = st.p, st.q, st.r, st.s
    if p == 1.0:
        return 1.0
    c = r / (1.0 - p)
    from_center = 1.0 + r + r * r + q * s
    from_end = s + s * r + (1.0 - s) * s
    return p * (c * from_center + (1.0 - c) * from_end)


def q_m4_poly(n: int, p: float) -> float:
    """The s = 1 m = 4 interception probability as a ratio of polynomials in p."""
    _strategy(n, p)
    num = (-n**3 * p**4 + 2 * n**2 * p**3 + 2 * n * p**3 - 3 * n * p**2
           - 3 * p**2 + 3 * p)
    return num / (1.0 - p)


def m4_quartic(n: int) -> tuple[float, float, float, float, float]:
    """Coefficients (c0, ..., c4) of the numerator of d/dp of :func:`q_m4_poly`."""
    return (3.0, -6.0 * (n + 1), 3.0 * (2 * n + 1) * (n + 1),
            -4.0 * n * (n * n + n + 1), 3.0 * n**3)


@dataclass(frozen=True)
class M4Constants:
    A: float
    B: float
    C: float
    D: float
    E: float
    F: float
    G: float

    def p_hat(self, n: int) -> float:
        """Root of the m = 4 quartic lying in (0, 1/n), by Ferrari's method."""
        rad = (self.C / (9.0 * n**4) + self.E / (3.0 * n**3 * self.D)
               + 4.0 * math.sqrt(2.0) * self.F / (9.0 * n**4 * self.G)
               - self.D / (3.0 * n**3))
        if rad < 0:
            raise ArithmeticError(f"negative radicand {rad} for n = {n}")
        return (2.0 * n * n + self.G / math.sqrt(2.0) - 3.0 * n * n * math.sqrt(rad)
                + 2.0 * n + 2.0) / (6.0 * n * n)


def m4_constants(n: int) -> M4Constants:
    """Intermediates of the radical solution of the m = 4 quartic.

    ``D**3 = (n-1)**3 (8n**3 + 6n**2 - 1) + 2 sqrt(B)`` and ``G**2 / (72 n**4)``
    is the square of Ferrari's ``S``.
    """
    if n < 2:
        raise ValidationError(f"m = 4 radical form needs n >= 2, got {n}")
    n = int(n)
    A = 8 * n**6 - 18 * n**5 + 6 * n**4 + 9 * n**3 - 3 * n**2
    B = (n - 1) ** 6 * n**3 * (32 * n**3 + 24 * n**2 - 3 * n - 4)
    C = 8 * (n * n + n + 1) ** 2 - 12 * n * (2 * n * n + 3 * n + 1)
    E = (4 * n * n - 1) * (n - 1) ** 2
    F = (4 * n**4 + 2 * n**3 + 6 * n * n + 11 * n + 4) * (n - 1) ** 2
    if B < 0:
        raise ArithmeticError(f"B = {B} < 0 for n = {n}")
    D = float(np.cbrt(A + 2.0 * math.sqrt(B) - 3 * n + 1))
    g2 = C - 6.0 * n * E / D + 6.0 * n * D
    if g2 < 0:
        raise ArithmeticError(f"negative radicand under G for n = {n}")
    return M4Constants(float(A), float(B), float(C), D, float(E), float(F), math.sqrt(g2))


def phat_m4_numeric(n: int) -> float:
    """Root of the m = 4 first-order condition in (0, 1/n) by bracketing.

    The quartic is 3 at p = 0 and ``-(1 - 1/n)**2`` at p = 1/n.
    """
    if n < 2:
        raise ValidationError(f"m = 4 interior optimum needs n >= 2, got {n}")
    c0, c1, c2, c3, c4 = m4_quartic(n)

    def f(p):
        return c0 + p * (c1 + p * (c2 + p * (c3 + p * c4)))

    return brentq(f, 0.0, 1.0 / n, xtol=1e-300, rtol=1e-15, maxiter=200)


def phat_m4(n: int) -> float:
    """Optimal m = 4 patrol probability; the bracketed root is authoritative."""
    numeric = phat_m4_numeric(n)
    try:
        radical = m4_constants(n).p_hat(n)
    except ArithmeticError as exc:
        log.warning("m = 4 radical form failed for n = %d: %s", n, exc)
        return numeric
    if abs(radical - numeric) > 1e-6:
        log.warning("m = 4 radical form %.17g disagrees with numeric root %.17g (n = %d)",
                    radical, numeric, n)
    return numeric


def asymptotics_m4() -> tuple[float, float]:
    """Large-n limits for m = 4: optimal holding probability and ``n * V``.

    Returns ``(r_inf, a)`` where ``r_inf`` is the real root of
    ``4r^3 - 6r^2 + 6r - 1`` and ``a = -r^4 + 2r^3 - 3r^2 + r + 1`` there.
    """
    t = math.sqrt(2.0) - 1.0
    r_inf = 0.5 * (1.0 - t ** (-1.0 / 3.0) + t ** (1.0 / 3.0))
    a = -3.0 * (5.0 - 4.0 * math.sqrt(2.0) - 7.0 * t ** (4.0 / 3.0)
                + t ** (2.0 / 3.0) * (2.0 * math.sqrt(2.0) - 1.0)) / (16.0 * t ** (4.0 / 3.0))
    cubic_root = brentq(lambda r: ((4.0 * r - 6.0) * r + 6.0) * r - 1.0, 0.0, 1.0,
                        xtol=1e-300, rtol=1e-15)
    if abs(cubic_root - r_inf) > 1e-12:
        raise ArithmeticError(f"radical root {r_inf} != bracketed root {cubic_root}")
    poly = -r_inf**4 + 2 * r_inf**3 - 3 * r_inf**2 + r_inf + 1
    if abs(poly - a) > 1e-12:
        raise ArithmeticError(f"radical constant {a} != poly(r_inf) = {poly}")
    return r_inf, a


def q_general(n: int, m: int, p: float) -> float:
    """Interception probability for any m at equilibrium play (s = 1, d = 2).

    Powers of ``w1`` (negative) and ``w2`` are built by repeated
    multiplication so the alternating sign of ``w1**m`` is exact.
    """
    GameConfig(n, m)
    st = _strategy(n, p)
    p = st.p
    if n == 1:
        # w1 = 0, w2 = 1 - p; also covers the u = 0 corner p = 1
        return 1.0 - (1.0 - p) ** (m - 1)
    u = math.sqrt((n * p + 1.0) ** 2 - 4.0 * p)
    w2 = 0.5 * (st.r + u)
    w1 = -st.q / w2
    pw1 = pw2 = 1.0
    for _ in range(m):
        pw1 *= w1
        pw2 *= w2
    base = 1.0 - 2.0 * p + n * p
    q = 1.0 - ((base + u) * pw2 - (base - u) * pw1) / (2.0 * (1.0 - p) * u)
    return min(max(q, 0.0), 1.0)  # roundoff near p = 1/n


def h_recursion(n: int, m: int, p: float) -> list[float]:
    """[h(1), ..., h(m)]: P(no interception | at C in the first attack period)."""
    GameConfig(n, m)
    st = _strategy(n, p)
    h = [1.0, st.q + st.r]
    for _ in range(m - 2):
        h.append(st.r * h[-1] + st.q * h[-2])
    return h[:m]


def q_from_recursion(n: int, m: int, p: float) -> float:
    """Interception probability rebuilt from ``h`` and ``c = r / (1 - p)``."""
    h = h_recursion(n, m, p)
    if p == 1.0:
        return 1.0
    c = (1.0 - n * p) / (1.0 - p)
    return 1.0 - (c * h[m - 1] + (1.0 - c) * h[m - 2])


def q_and_slope(n: int, m: int, p: float) -> tuple[float, float]:
    """Interception probability and its exact derivative in ``p``.

    Differentiates the ``h`` recursion alongside itself, using
    ``dr/dp = -n`` and ``dq/dp = n - 1``.
    """
    GameConfig(n, m)
    st = _strategy(n, p)
    if st.p == 1.0:
        return 1.0, 0.0
    r, q = st.r, st.q
    h0, h1 = 1.0, q + r
    g0, g1 = 0.0, -1.0  # d h(1)/dp, d h(2)/dp
    for _ in range(m - 2):
        h0, h1, g0, g1 = (h1, r * h1 + q * h0,
                          g1, r * g1 - n * h1 + q * g0 + (n - 1) * h0)
    c = r / (1.0 - p)
    dc = (1.0 - n) / (1.0 - p) ** 2
    miss = c * h1 + (1.0 - c) * h0
    dmiss = dc * (h1 - h0) + c * g1 + (1.0 - c) * g0
    return 1.0 - miss, -dmiss
