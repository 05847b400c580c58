"""Monte Carlo play of the full game on the star S_n.

The simulator walks the Patroller on all ``n + 1`` nodes (no lumping) and
runs the Attacker's observe-and-delay rule literally, so it is an
independent check on every exact computation in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba as nb
import numpy as np
from scipy.stats import chisquare

from ._rng import MASK64, next_uniform, stream_base
from .hitting import interception_for_delay, pmf_matrix_power
from .model import GameConfig, PatrollerStrategy, ValidationError, validate

__all__ = [
    "SimulationError",
    "SimConfig",
    "SimResult",
    "run",
    "exact_interception",
    "play_presence",
    "sample_hitting_times",
    "LumpingReport",
    "lumping_check",
    "CouplingRow",
    "CouplingReport",
    "coupling_check",
]

# TBB in this image is too old for numba; skip the probe warning
if nb.config.THREADING_LAYER == "default":
    nb.config.THREADING_LAYER = "omp"

TIMEOUT_LIMIT = 1e-3
CENTER, ATTACKED = 0, 1
# lumped states for the coupling
_E, _C, _A = 0, 1, 2


class SimulationError(RuntimeError):
    """A simulation could not produce a trustworthy estimate."""


@dataclass(frozen=True)
class SimConfig:
    game: GameConfig
    strat: PatrollerStrategy
    d: int = 2
    trials: int = 10**6
    seed: int = 42
    max_steps: int = 10**6
    stationary_start: bool = False

    def __post_init__(self):
        validate(self.game, self.strat)
        if isinstance(self.d, bool) or int(self.d) != self.d or self.d < 1:
            raise ValidationError(f"d must be an integer >= 1, got {self.d!r}")
        if self.trials < 1:
            raise ValidationError(f"trials must be >= 1, got {self.trials}")
        if self.max_steps < self.d + self.game.m:
            raise ValidationError(
                f"max_steps = {self.max_steps} must be at least d + m = {self.d + self.game.m}")


@dataclass(frozen=True)
class SimResult:
    intercept_count: int
    trials: int
    timeouts: int
    q_hat: float
    half_width_95: float
    mean_attack_start_time: float

    def z_score(self, exact: float) -> float:
        """|q_hat - exact| in units of the 95% half-width (inf if it is 0)."""
        diff = abs(self.q_hat - exact)
        if self.half_width_95 == 0.0:
            return 0.0 if diff == 0.0 else math.inf
        return diff / self.half_width_95


@nb.njit(cache=True, inline="always")
def _step(pos, u, n, p, s):
    """One move of the Patroller on the star; node 0 is the center."""
    if pos == CENTER:
        if u < n * p:
            k = int(u / p) + 1
            return k if k <= n else n
        return CENTER
    return CENTER if u < s else pos


@nb.njit(cache=True, inline="always")
def _observe(counter, armed, present):
    """Attacker's bookkeeping for one period.

    Counting starts once the Patroller has been seen at the target; any
    sighting resets the count of consecutive absences.
    """
    if present:
        return 0, True
    if armed:
        return counter + 1, True
    return counter, False


@nb.njit(cache=True)
def _play_presence(presence, d, m):
    counter, armed = 0, False
    for t in range(presence.shape[0]):
        counter, armed = _observe(counter, armed, presence[t] == 1)
        if counter == d:
            window = presence[t:t + m]
            if window.shape[0] < m:
                return t + 1, -1
            for v in window:
                if v == 1:
                    return t + 1, 1
            return t + 1, 0
    return -1, -1


def play_presence(presence, d: int, m: int) -> tuple[int, int]:
    """Run the Attacker's rule on a scripted presence (1) / absence (0) record.

    Returns ``(start, outcome)``: ``start`` is the 1-based period in which the
    attack begins (-1 if it never does) and ``outcome`` is 1 for intercepted,
    0 for successful, -1 if the record ends before the attack does.
    """
    return _play_presence(np.asarray(presence, dtype=np.int64), d, m)


@nb.njit(cache=True, parallel=True)
def _play_kernel(n, p, s, d, m, trials, seed, max_steps, stationary):
    intercepts = 0
    timeouts = 0
    start_sum = 0
    pi_center = s / (s + n * p)
    for t in nb.prange(trials):
        state = stream_base(seed, t)
        pos = ATTACKED
        if stationary:
            state, u = next_uniform(state)
            if u < pi_center:
                pos = CENTER
            else:
                pos = min(1 + int((u - pi_center) / (1.0 - pi_center) * n), n)
        counter, armed = _observe(0, False, pos == ATTACKED)
        clock = 0
        started = False
        while clock < max_steps:
            state, u = next_uniform(state)
            pos = _step(pos, u, n, p, s)
            clock += 1
            counter, armed = _observe(counter, armed, pos == ATTACKED)
            if counter == d:
                started = True
                break
        hit = 0
        if started:
            start_sum += clock
            for _ in range(m - 1):
                state, u = next_uniform(state)
                pos = _step(pos, u, n, p, s)
                if pos == ATTACKED:
                    hit = 1
                    break
        else:
            timeouts += 1
        intercepts += hit
    return intercepts, timeouts, start_sum


def _seed64(seed: int) -> np.uint64:
    return np.uint64(int(seed) & MASK64)


def run(config: SimConfig) -> SimResult:
    """Simulate ``config.trials`` independent games and estimate Q.

    Each trial starts with the Patroller at the attacked end (or, with
    ``stationary_start``, at a node drawn from the stationary law) and ends
    when the attack is complete. Trials whose attack has not started after
    ``max_steps`` periods are counted as timeouts and excluded.
    """
    g, st = config.game, config.strat
    hits, timeouts, start_sum = _play_kernel(
        st.n, st.p, st.s, config.d, g.m, config.trials, _seed64(config.seed),
        config.max_steps, config.stationary_start)
    if timeouts > TIMEOUT_LIMIT * config.trials:
        raise SimulationError(
            f"{timeouts} of {config.trials} trials timed out after {config.max_steps} steps")
    done = config.trials - timeouts
    if done == 0:
        raise SimulationError("every trial timed out")
    q_hat = hits / done
    half = 1.96 * math.sqrt(q_hat * (1.0 - q_hat) / done)
    return SimResult(int(hits), int(done), int(timeouts), q_hat, half, start_sum / done)


def exact_interception(config: SimConfig) -> float:
    return interception_for_delay(config.game, config.strat, config.d)


@nb.njit(cache=True, parallel=True)
def _hitting_kernel(n, p, s, trials, seed, cap):
    out = np.empty(trials, dtype=np.int64)
    for t in nb.prange(trials):
        state = stream_base(seed, t)
        pos = CENTER
        k = 0
        while True:
            state, u = next_uniform(state)
            pos = _step(pos, u, n, p, s)
            k += 1
            if pos == ATTACKED or k > cap:
                break
        out[t] = k
    return out


def sample_hitting_times(strat: PatrollerStrategy, trials: int, seed: int,
                         cap: int = 10**6) -> np.ndarray:
    """Sample T_C on the full star starting from the center at time 0.

    Values above ``cap`` are reported as ``cap + 1``.
    """
    return _hitting_kernel(strat.n, strat.p, strat.s, trials, _seed64(seed), cap)


@dataclass
class LumpingReport:
    statistic: float
    pvalue: float
    dof: int
    observed: np.ndarray
    expected: np.ndarray
    impossible_hits: int
    alpha: float = 1e-3

    @property
    def passed(self) -> bool:
        return self.impossible_hits == 0 and self.pvalue >= self.alpha


def lumping_check(game: GameConfig, strat: PatrollerStrategy, trials: int = 10**5,
                  seed: int = 42, support: int = 30, alpha: float = 1e-3) -> LumpingReport:
    """Chi-square test of simulated full-star T_C against the lumped-chain law.

    Bins are ``1..support`` plus one bin for ``T_C > support``; bins with
    expected count below 5 are pooled into the last bin, and zero-probability
    bins must stay empty.
    """
    validate(game, strat)
    times = sample_hitting_times(strat, trials, seed, cap=support)
    counts = np.bincount(times, minlength=support + 2)[1:support + 2].astype(float)
    dist = pmf_matrix_power(strat, support)
    probs = np.append(dist.pmf, dist.truncated_mass)
    expected = probs * trials

    zero = probs == 0.0
    impossible = int(counts[zero].sum())
    keep = ~zero & (expected >= 5.0)
    pool = ~zero & ~keep
    obs = list(counts[keep])
    exp = list(expected[keep])
    if pool.any():
        obs.append(counts[pool].sum())
        exp.append(expected[pool].sum())
    obs, exp = np.array(obs), np.array(exp)
    exp *= obs.sum() / exp.sum()  # absorb rounding in sum(probs)
    if obs.size < 2:
        stat, pvalue = 0.0, 1.0
    else:
        stat, pvalue = chisquare(obs, exp)
    return LumpingReport(float(stat), float(pvalue), int(obs.size - 1), obs, exp,
                         impossible, alpha)


@nb.njit(cache=True, parallel=True)
def _coupling_kernel(p, q, s, c_hat, m, trials, seed, max_steps):
    violations = 0
    hits = 0
    hits_tilde = 0
    rescued = 0
    timeouts = 0
    for t in nb.prange(trials):
        state = stream_base(seed, t)
        state, u = next_uniform(state)
        x = _C if u < c_hat else _E
        prev = x
        T = 1
        T_tilde = 1
        done = False
        while T < max_steps:
            state, u = next_uniform(state)
            if x == _C:
                if u < p:
                    x = _A
                elif u < p + q:
                    x = _E
                else:
                    x = _C
            else:
                x = _C if u < s else _E
            T += 1
            # the collapsed path drops every E that repeats the previous E
            if not (x == _E and prev == _E):
                T_tilde += 1
            prev = x
            if x == _A:
                done = True
                break
        if done:
            if T_tilde > T:
                violations += 1
            if T <= m:
                hits += 1
            if T_tilde <= m:
                hits_tilde += 1
                if T > m:
                    rescued += 1
        else:
            timeouts += 1
    return violations, hits, hits_tilde, rescued, timeouts


@dataclass(frozen=True)
class CouplingRow:
    s: float
    paths: int
    violations: int
    q_s: float
    q_reflect: float
    rescued: int
    exact_q_s: float
    exact_q_reflect: float
    timeouts: int

    def half_width(self, q: float) -> float:
        return 1.96 * math.sqrt(q * (1.0 - q) / self.paths)


@dataclass
class CouplingReport:
    game: GameConfig
    p: float
    rows: list[CouplingRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        for row in self.rows:
            if row.violations or row.q_reflect < row.q_s:
                return False
            if self.game.m >= 3 and row.s < 1.0 and row.rescued == 0:
                return False
        return True


def coupling_check(game: GameConfig, p: float, s_grid, trials: int = 10**6,
                   seed: int = 42, max_steps: int = 10**6) -> CouplingReport:
    """Pathwise coupling of a patrol with ``s < 1`` and its reflecting version.

    Paths start in the first attack period against delay 2, at C with
    probability ``r / (1 - p)``. Deleting every repeated E from a path gives a
    path of the ``s = 1`` patrol on the same randomness, whose hitting time
    ``T~`` can never exceed the original ``T``. Any violation is an error.
    """
    report = CouplingReport(game, p)
    for s in s_grid:
        st = PatrollerStrategy(game.n, p, s)
        validate(game, st)
        if st.p == 1.0:
            raise ValidationError("the attack never starts when n = 1 and p = 1")
        c_hat = st.r / (1.0 - st.p)
        viol, hits, hits_t, rescued, timeouts = _coupling_kernel(
            st.p, st.q, st.s, c_hat, game.m, trials, _seed64(seed), max_steps)
        if viol:
            raise SimulationError(f"coupling violated on {viol} paths at s = {s}")
        done = trials - timeouts
        if timeouts > TIMEOUT_LIMIT * trials or done == 0:
            raise SimulationError(f"{timeouts} coupled paths did not reach A at s = {s}")
        report.rows.append(CouplingRow(
            s=st.s, paths=done, violations=int(viol), q_s=hits / done,
            q_reflect=hits_t / done, rescued=int(rescued),
            exact_q_s=interception_for_delay(game, st, 2),
            exact_q_reflect=interception_for_delay(game, PatrollerStrategy(game.n, p, 1.0), 2),
            timeouts=int(timeouts)))
    return report
