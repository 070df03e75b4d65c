"""bandit-elim command line: run, predict, lower-bound, oracle.

Exit codes: 0 ok, 2 bad configuration or arguments, 3 algorithm failure,
4 a verification check failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys

from . import bench, lower_bound, oracle_checks, schedule

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_CHECK = 0, 2, 3, 4

SMALL_GRID_TRIALS = 20_000
FULL_GRID_TRIALS = 100_000
AGREEMENT_REQUIRED = 0.99


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)


def _out(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _err(text: str) -> None:
    print(text, file=sys.stderr)


def cmd_run(args) -> int:
    try:
        cfg = bench.load_config(args.config)
    except bench.ConfigError as exc:
        _err(f"config error: {exc}")
        return EXIT_CONFIG
    try:
        report = bench.run(cfg, timing=args.timing, log=None if args.quiet else _err)
    except bench.AlgorithmError as exc:
        _err(f"algorithm error: {exc}")
        return EXIT_RUNTIME
    if args.out:
        report.write_csv(args.out)
    else:
        sys.stdout.write(report.to_csv())
    if not args.quiet:
        _err(report.table())
    return EXIT_OK


def format_prediction(pred: schedule.SchedulePrediction) -> str:
    lines = [f"algorithm {pred.algorithm}  n={pred.n}  eps={pred.eps:g}  delta={pred.delta:g}"]
    if pred.lam is not None:
        lines[0] += f"  lambda={pred.lam:g}"
    if pred.alpha is not None:
        lines[0] += f"  alpha={pred.alpha:g}"
    if pred.fallback:
        lines.append("fallback: naive elimination")
    lines.append(f"{'round':>5} {'arms':>10} {'per-arm':>10} {'samples':>16}")
    for i, (count, per_arm) in enumerate(pred.per_round, 1):
        lines.append(f"{i:>5} {count:>10,} {per_arm:>10,} {count * per_arm:>16,}")
    lines.append(f"total {pred.total_samples:,}")
    lines += [f"warning: {w}" for w in pred.warnings]
    return "\n".join(lines)


def cmd_predict(args) -> int:
    try:
        pred = schedule.predict_samples(args.algo, args.n, args.eps, args.delta, args.lam, args.alpha)
    except ValueError as exc:
        _err(f"invalid parameters: {exc}")
        return EXIT_CONFIG
    _out(format_prediction(pred))
    return EXIT_OK


CHAIN_COLUMNS = ("beta", "delta", "eps", "m", "k", "z", "holds", "failing_step") + lower_bound.CHAIN_STEPS + (
    "tail_sf", "tail_lower_bound", "exp_bound", "delta_pow", "binomial_tail")
_LHS_KEYS = ("normal_sf", "borjesson", "exp_bound", "delta_pow", "binomial_tail")


def cmd_lower_bound(args) -> int:
    if not 0 < args.beta < 0.5:
        _err("invalid parameters: beta must lie in (0, 1/2)")
        return EXIT_CONFIG
    if not 0 < args.delta < 1:
        _err("invalid parameters: delta must lie in (0, 1)")
        return EXIT_CONFIG
    eps = args.eps if args.eps is not None else 0.5e-4 * args.beta
    if not 0 < eps < 0.5:
        _err("invalid parameters: eps must lie in (0, 1/2)")
        return EXIT_CONFIG
    rep = lower_bound.verify_chain(args.beta, args.delta, eps)
    g = bench._g
    header = list(CHAIN_COLUMNS)
    row = [g(rep.beta), g(rep.delta), g(rep.eps), str(rep.m), g(rep.k), g(rep.z),
           str(rep.holds).lower(), rep.failing_step or ""]
    row += [str(rep.steps[s]).lower() for s in lower_bound.CHAIN_STEPS]
    row += [g(rep.lhs_values[c]) for c in _LHS_KEYS]

    if args.n is not None or args.trials is not None:
        if args.n is None or args.trials is None:
            _err("invalid parameters: --n and --trials go together")
            return EXIT_CONFIG
        try:
            cfg = lower_bound.LowerBoundConfig(args.n, eps, args.delta, args.beta)
            hits, trials = lower_bound.exclusion_rate(cfg, args.trials, args.seed,
                                                      oracle_checks.resolve_parallel(args.max_parallel))
        except ValueError as exc:
            _err(f"invalid parameters: {exc}")
            return EXIT_CONFIG
        exact = lower_bound.exact_exclusion_probability(cfg.n, cfg.m, cfg.eps, cfg.discard_size)
        lo, hi = oracle_checks.wilson_interval(hits, trials)
        header += ["n", "trial_m", "discard", "trials", "excluded", "exclusion_rate", "wilson_lo", "wilson_hi",
                   "exact_rate"]
        row += [str(cfg.n), str(cfg.m), str(cfg.discard_size), str(trials), str(hits), g(hits / trials),
                g(lo), g(hi), g(exact)]

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerow(row)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            f.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    if args.check and not rep.holds:
        _err(f"chain does not hold; failing step: {rep.failing_step}")
        return EXIT_CHECK
    return EXIT_OK


def cmd_oracle(args) -> int:
    trials = args.trials or (FULL_GRID_TRIALS if args.grid == "full" else SMALL_GRID_TRIALS)
    grid = oracle_checks.AGREEMENT_GRID if args.grid == "full" else oracle_checks.AGREEMENT_GRID[:4]
    rows = oracle_checks.agreement_grid(trials, args.seed, grid, oracle_checks.resolve_parallel(args.max_parallel))
    _out(f"{'means':<20}{'s':>4}{'eps':>6}{'exact':>11}{'mc':>11}{'tol':>10}  ok")
    for r in rows:
        means = ",".join(f"{m:g}" for m in r.means)
        _out(f"{means:<20}{r.samples_per_arm:>4}{r.eps:>6g}{r.exact:>11.6f}{r.mc:>11.6f}{r.tolerance:>10.6f}  "
             f"{'yes' if r.agrees else 'NO'}")
    frac = sum(r.agrees for r in rows) / len(rows)
    _out(f"agreement {frac:.1%} of {len(rows)} grid points at {trials} trials")
    return EXIT_OK if frac >= AGREEMENT_REQUIRED else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bandit-elim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run a JSON experiment config and emit a CSV report")
    r.add_argument("config")
    r.add_argument("--out", help="CSV path (default: stdout)")
    r.add_argument("--timing", action="store_true", help="fill wall_seconds (makes the CSV run-dependent)")
    r.add_argument("--quiet", action="store_true", help="no progress or summary table on stderr")
    r.set_defaults(func=cmd_run)

    q = sub.add_parser("predict", help="analytic per-round budgets and total samples")
    q.add_argument("--algo", required=True, choices=schedule.ALGORITHMS)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--eps", type=float, required=True)
    q.add_argument("--delta", type=float, required=True)
    q.add_argument("--lambda", dest="lam", type=float)
    q.add_argument("--alpha", type=float)
    q.set_defaults(func=cmd_predict)

    lb = sub.add_parser("lower-bound", help="tail-bound chain report, optionally with exclusion trials")
    lb.add_argument("--beta", type=float, required=True)
    lb.add_argument("--delta", type=float, required=True)
    lb.add_argument("--eps", type=float, help="default 0.5e-4 * beta (inside the regime)")
    lb.add_argument("--n", type=int)
    lb.add_argument("--trials", type=int)
    lb.add_argument("--seed", type=int, default=0)
    lb.add_argument("--max-parallel", type=int, default=0)
    lb.add_argument("--out")
    lb.add_argument("--check", action="store_true", help="exit 4 when the chain does not hold")
    lb.set_defaults(func=cmd_lower_bound)

    o = sub.add_parser("oracle", help="exact vs Monte Carlo agreement for naive elimination")
    o.add_argument("--grid", choices=("small", "full"), default="small")
    o.add_argument("--trials", type=int)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--max-parallel", type=int, default=1)
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
