"""Game solutions for any (n, m) and computational equilibrium checks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import formulas
from .hitting import interception_for_delay
from .model import GameConfig, PatrollerStrategy, SolveResult, ValidationError
from .optimize import ConvergenceError, golden_max

__all__ = [
    "ConvergenceError",
    "solve",
    "solve_numeric",
    "best_delay",
    "EquilibriumReport",
    "verify_equilibrium",
    "S_GRID",
]

# tolerance used to call two exact interception probabilities equal
TIE_TOL = 1e-12
S_GRID = tuple(round(0.05 * k, 2) for k in range(1, 21))


def solve_numeric(config: GameConfig) -> SolveResult:
    """Maximize the equilibrium interception probability over ``p`` in (0, 1/n]."""
    n, m = config.n, config.m
    hi = 1.0 / n
    res = golden_max(lambda p: formulas.q_general(n, m, p), 1e-12 / n, hi,
                     slope=lambda p: formulas.q_and_slope(n, m, p)[1])
    value = formulas.q_general(n, m, res.x)
    return SolveResult(n, m, res.x, value, "numeric", {
        "iterations": res.iterations,
        "bracket_width": res.bracket[1] - res.bracket[0],
        "polished": res.polished,
        "golden_vs_polished": abs(res.x_golden - res.x),
    })


def solve(config: GameConfig) -> SolveResult:
    """Optimal patrol probability and game value.

    Closed forms are used for m = 2, odd m and m = 4 (n >= 2); every closed
    form is cross-checked against the numeric maximizer and the residuals are
    stored in ``diagnostics``.
    """
    n, m = config.n, config.m
    if m == 2:
        closed = formulas.solve_m2(n)
    elif m % 2 == 1:
        closed = formulas.value_odd(n, m)
    elif m == 4 and n >= 2:
        p_hat = formulas.phat_m4(n)
        radical = formulas.m4_constants(n).p_hat(n)
        closed = SolveResult(n, m, p_hat, formulas.q_m4(n, p_hat), "closed_m4",
                             {"radical_residual": abs(radical - p_hat)})
    else:
        return solve_numeric(config)

    diag = dict(closed.diagnostics)
    if m % 2 == 1:
        # boundary optimum: the grid maximum must not exceed the closed value
        grid = np.linspace(1.0 / (1000 * n), 1.0 / n, 1000)
        diag["grid_excess"] = max(formulas.q_general(n, m, p) for p in grid) - closed.value
    else:
        num = solve_numeric(config)
        diag["numeric_p_residual"] = abs(num.p_hat - closed.p_hat)
        diag["iterations"] = num.diagnostics["iterations"]
        diag["bracket_width"] = num.diagnostics["bracket_width"]
    diag["value_residual"] = abs(formulas.q_general(n, m, closed.p_hat) - closed.value)
    return SolveResult(n, m, closed.p_hat, closed.value, closed.method, diag)


def best_delay(config: GameConfig, strat: PatrollerStrategy, d_max: int = 30
               ) -> tuple[int, list[float]]:
    """Attacker's best delay in ``1..d_max`` and the full list of Q(d).

    Values within ``TIE_TOL`` of the minimum count as ties; the smallest
    tied delay is reported.
    """
    if d_max < 2:
        raise ValidationError(f"d_max must be >= 2, got {d_max}")
    qs = [interception_for_delay(config, strat, d) for d in range(1, d_max + 1)]
    low = min(qs)
    d_star = next(d for d, q in enumerate(qs, start=1) if q <= low + TIE_TOL)
    return d_star, qs


@dataclass
class EquilibriumReport:
    """Outcome of :func:`verify_equilibrium`; ``passed`` is the verdict."""

    config: GameConfig
    solution: SolveResult
    d_star: int
    delay_values: list[float]
    delay_gap: float
    delay_ok: bool
    reflection_margin: float
    pointwise_margin: float
    s_flatness: float
    grid_argmax: tuple[float, float]
    p_step: float
    reflection_ok: bool
    location_ok: bool
    min_optimal_s: float | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.delay_ok and self.reflection_ok and self.location_ok

    def summary(self) -> dict:
        return {
            "n": self.config.n, "m": self.config.m,
            "p_hat": self.solution.p_hat, "value": self.solution.value,
            "d_star": self.d_star, "delay_gap": self.delay_gap,
            "reflection_margin": self.reflection_margin,
            "pointwise_margin": self.pointwise_margin,
            "s_flatness": self.s_flatness,
            "grid_argmax_s": self.grid_argmax[0], "grid_argmax_p": self.grid_argmax[1],
            "min_optimal_s": self.min_optimal_s, "passed": self.passed,
        }


def verify_equilibrium(config: GameConfig, *, d_max: int = 30, p_points: int = 200,
                       s_grid: tuple[float, ...] = S_GRID) -> EquilibriumReport:
    """Check that delay 2 and reflection s = 1 are mutual best responses.

    (i) Against the optimal patrol ``(p_hat, s = 1)`` delay 2 minimizes the
    exact interception probability over ``d <= d_max``, uniquely for even m
    and with all delays tied for odd m (where ``p_hat = 1/n``).
    (ii) Against delay 2 the exact interception probability over the
    ``(s, p)`` grid peaks at ``s = 1`` and within one grid step of ``p_hat``;
    strictly in ``s`` for m >= 3 and flat in ``s`` for m = 2.
    """
    n, m = config.n, config.m
    sol = solve(config)
    strat = PatrollerStrategy(n, sol.p_hat, 1.0)
    d_star, qs = best_delay(config, strat, d_max)
    others = [q for d, q in enumerate(qs, start=1) if d != 2]
    gap = min(others) - qs[1]
    notes = []
    if m % 2 == 0:
        delay_ok = d_star == 2 and gap > TIE_TOL
    else:
        spread = max(qs) - min(qs)
        delay_ok = qs[1] <= min(qs) + TIE_TOL and spread <= TIE_TOL
        notes.append(f"odd m: delay spread {spread:.3g}")

    p_step = 1.0 / (p_points * n)
    p_grid = [k / (p_points * n) for k in range(1, p_points + 1)]
    s_list = list(s_grid)
    if s_list[-1] != 1.0:
        s_list.append(1.0)
    table = np.array([[interception_for_delay(config, PatrollerStrategy(n, p, s), 2)
                       for p in p_grid] for s in s_list])
    reflect_row, rest = table[-1], table[:-1]
    i, j = np.unravel_index(int(np.argmax(table)), table.shape)
    reflection_margin = float(reflect_row.max() - rest.max())
    pointwise_margin = float((reflect_row - rest.max(axis=0)).min())
    s_flatness = float((table.max(axis=0) - table.min(axis=0)).max())
    best_p = p_grid[int(np.argmax(reflect_row))]
    location_ok = abs(best_p - sol.p_hat) <= p_step * (1 + 1e-9)

    min_optimal_s = None
    if m == 2:
        reflection_ok = s_flatness <= TIE_TOL
        # smallest grid s still guaranteeing V against every delay
        for s in s_list:
            worst = min(best_delay(config, PatrollerStrategy(n, sol.p_hat, s), d_max)[1])
            if worst >= sol.value - TIE_TOL:
                min_optimal_s = s
                break
    else:
        reflection_ok = (s_list[i] == 1.0 and reflection_margin > 0.0
                         and pointwise_margin > -TIE_TOL)

    return EquilibriumReport(
        config=config, solution=sol, d_star=d_star, delay_values=qs,
        delay_gap=gap, delay_ok=delay_ok, reflection_margin=reflection_margin,
        pointwise_margin=pointwise_margin, s_flatness=s_flatness,
        grid_argmax=(s_list[i], p_grid[j]), p_step=p_step,
        reflection_ok=reflection_ok, location_ok=location_ok,
        min_optimal_s=min_optimal_s, notes=notes)
