"""Bracketed scalar maximization on an interval."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

__all__ = ["ConvergenceError", "MaxResult", "golden_max"]

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class ConvergenceError(RuntimeError):
    """Raised when the optimizer exhausts its iteration cap."""


@dataclass
class MaxResult:
    x: float
    fx: float
    iterations: int
    bracket: tuple[float, float]
    x_golden: float
    polished: bool


def golden_max(f: Callable[[float], float], lo: float, hi: float, *,
               slope: Callable[[float], float] | None = None,
               prescan: int = 1000, rel_tol: float = 1e-12,
               max_iter: int = 200) -> MaxResult:
    """Maximize ``f`` on ``[lo, hi]``.

    A uniform pre-scan of ``prescan`` points picks the best grid point and the
    golden-section search runs inside its two neighbouring cells, so a
    multi-modal ``f`` still ends near the global grid optimum.

    Golden section alone cannot locate a smooth maximum much better than
    ``sqrt(eps)`` relative, because ``f`` is flat there. If ``slope`` (the
    exact derivative) is given and changes sign across the final bracket
    neighbourhood, the result is polished to the root of ``slope``.
    """
    grid = np.linspace(lo, hi, prescan)
    vals = np.array([f(x) for x in grid])
    j = int(np.argmax(vals))
    a = grid[max(j - 1, 0)]
    b = grid[min(j + 1, prescan - 1)]
    seg_lo, seg_hi = a, b

    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    it = 0
    while b - a > rel_tol * max(abs(a), abs(b)):
        if it >= max_iter:
            raise ConvergenceError(
                f"golden section did not converge in {max_iter} iterations; "
                f"bracket [{a!r}, {b!r}] width {b - a:.3g}")
        it += 1
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
    x_gold = x1 if f1 >= f2 else x2
    x, fx, polished = x_gold, max(f1, f2), False

    # endpoints of the pre-scan segment may beat (or tie) the interior estimate
    for edge in (seg_lo, seg_hi):
        fe = f(edge)
        if fe >= fx:
            x, fx = edge, fe

    if slope is not None:
        s_lo, s_hi = slope(seg_lo), slope(seg_hi)
        if s_lo > 0.0 > s_hi:
            root = brentq(slope, seg_lo, seg_hi, xtol=1e-300, rtol=4 * np.finfo(float).eps)
            x, fx, polished = root, f(root), True

    return MaxResult(x=float(x), fx=float(fx), iterations=it,
                     bracket=(float(a), float(b)), x_golden=float(x_gold),
                     polished=polished)
