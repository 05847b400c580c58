"""Command-line entry point.

Single queries print one JSON object to stdout; ``sweep`` writes CSV files.
Exit codes: 0 success, 1 invalid input, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from . import formulas
from .hitting import interception_for_delay
from .model import GameConfig, PatrollerStrategy, ValidationError
from .montecarlo import SimConfig, SimulationError, coupling_check, exact_interception, run
from .optimize import ConvergenceError
from .solver import solve, verify_equilibrium
from .uniformcost import uniform_cost

SEED_ENV = "UNIFORMED_PATROLLER_SEED"
EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2
COUPLING_S_GRID = (0.3, 0.6, 0.9)

log = logging.getLogger("uniformed_patroller")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 42
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _strategy(args, config: GameConfig) -> PatrollerStrategy:
    p = args.p if args.p is not None else solve(config).p_hat
    return PatrollerStrategy(config.n, p, args.s)


def _emit(record: dict) -> None:
    print(json.dumps(record))


def cmd_value(args) -> int:
    config = GameConfig(args.n, args.m)
    strat = _strategy(args, config)
    q = interception_for_delay(config, strat, args.d)
    _emit({"n": config.n, "m": config.m, "p": strat.p, "s": strat.s, "d": args.d, "Q": q})
    return EXIT_OK


def cmd_solve(args) -> int:
    _emit(solve(GameConfig(args.n, args.m)).as_dict())
    return EXIT_OK


def write_sweep(ns, ms, p_steps: int, out_path) -> tuple[Path, Path]:
    """Write the Q(p) curves and the matching optima as CSV.

    ``p`` runs over ``k / (p_steps * n)`` for ``k = 1..p_steps``. Numbers use
    17 significant digits and ``\\n`` line endings, so equal inputs give
    byte-identical files.
    """
    if p_steps < 2:
        raise ValidationError(f"p_steps must be >= 2, got {p_steps}")
    configs = [GameConfig(n, m) for n in ns for m in ms]
    out = Path(out_path)
    optima = out.with_name(f"{out.stem}.optima{out.suffix or '.csv'}")
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "m", "p", "q"])
        for c in configs:
            for k in range(1, p_steps + 1):
                p = k / (p_steps * c.n)
                w.writerow([c.n, c.m, _fmt(p), _fmt(formulas.q_general(c.n, c.m, p))])
    with open(optima, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "m", "p_hat", "r_hat", "value"])
        for c in configs:
            sol = solve(c)
            w.writerow([c.n, c.m, _fmt(sol.p_hat), _fmt(sol.r_hat), _fmt(sol.value)])
    return out, optima


def cmd_sweep(args) -> int:
    out, optima = write_sweep(args.n, args.m, args.p_steps, args.out)
    _emit({"curves": str(out), "optima": str(optima)})
    return EXIT_OK


def _verify(config: GameConfig, trials: int, seed: int) -> dict:
    eq = verify_equilibrium(config)
    coupling = coupling_check(config, eq.solution.p_hat, COUPLING_S_GRID, trials, seed)
    return {
        "equilibrium": eq.summary(),
        "coupling": [{"s": r.s, "violations": r.violations, "q_s": r.q_s,
                      "q_reflect": r.q_reflect, "rescued": r.rescued} for r in coupling.rows],
        "coupling_passed": coupling.passed,
        "passed": eq.passed and coupling.passed,
    }


def cmd_simulate(args) -> int:
    config = GameConfig(args.n, args.m)
    strat = _strategy(args, config)
    seed = args.seed if args.seed is not None else _default_seed()
    sim = SimConfig(config, strat, args.d, args.trials, seed, args.max_steps,
                    args.stationary_start)
    res = run(sim)
    exact = exact_interception(sim)
    record = {
        "n": config.n, "m": config.m, "p": strat.p, "s": strat.s, "d": args.d,
        "trials": args.trials, "seed": seed,
        "q_hat": res.q_hat, "half_width_95": res.half_width_95,
        "ci_low": res.q_hat - res.half_width_95, "ci_high": res.q_hat + res.half_width_95,
        "exact": exact, "z": res.z_score(exact), "timeouts": res.timeouts,
        "mean_attack_start_time": res.mean_attack_start_time,
    }
    code = EXIT_OK
    if args.verify:
        report = _verify(config, args.trials, seed)
        record["verify"] = report
        code = EXIT_OK if report["passed"] else EXIT_RUNTIME
    _emit(record)
    return code


def cmd_uniform_cost(args) -> int:
    config = GameConfig(args.n, args.m)
    _emit({"n": config.n, "m": config.m, **uniform_cost(config).as_dict()})
    return EXIT_OK


def cmd_verify(args) -> int:
    config = GameConfig(args.n, args.m)
    seed = args.seed if args.seed is not None else _default_seed()
    report = _verify(config, args.trials, seed)
    _emit({"n": config.n, "m": config.m, **report})
    return EXIT_OK if report["passed"] else EXIT_RUNTIME


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="uniformed-patroller",
                     description="Solve and simulate the uniformed patroller game on a star.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def game(sp):
        sp.add_argument("--n", type=int, required=True, help="number of end nodes")
        sp.add_argument("--m", type=int, required=True, help="attack duration")

    def play(sp):
        sp.add_argument("--p", type=float, help="center-to-end probability (default: optimal)")
        sp.add_argument("--s", type=float, default=1.0, help="end-to-center probability")
        sp.add_argument("--d", type=int, default=2, help="attack delay")

    sp = sub.add_parser("value", help="exact interception probability")
    game(sp)
    play(sp)
    sp.set_defaults(func=cmd_value)

    sp = sub.add_parser("solve", help="optimal patrol and game value")
    game(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("sweep", help="Q(p) curves and optima as CSV")
    sp.add_argument("--n", type=int, nargs="+", required=True)
    sp.add_argument("--m", type=int, nargs="+", default=list(range(2, 11)))
    sp.add_argument("--p-steps", type=int, default=500)
    sp.add_argument("--out", required=True, help="curve CSV; optima go to <stem>.optima.csv")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("simulate", help="Monte Carlo estimate against the exact value")
    game(sp)
    play(sp)
    sp.add_argument("--trials", type=int, default=10**6)
    sp.add_argument("--seed", type=int, help=f"default: ${SEED_ENV} or 42")
    sp.add_argument("--max-steps", type=int, default=10**6)
    sp.add_argument("--stationary-start", action="store_true")
    sp.add_argument("--verify", action="store_true",
                    help="also run the equilibrium and coupling checks")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("uniform-cost", help="compare with the non-uniformed game")
    game(sp)
    sp.set_defaults(func=cmd_uniform_cost)

    sp = sub.add_parser("verify", help="equilibrium and coupling checks")
    game(sp)
    sp.add_argument("--trials", type=int, default=10**6)
    sp.add_argument("--seed", type=int)
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ConvergenceError, SimulationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
