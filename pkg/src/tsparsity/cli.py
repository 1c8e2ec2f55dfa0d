"""Command-line entry point.

Every subcommand writes ``# key=value`` lines with its resolved
configuration, followed by a CSV table.  ``sample`` is the exception: its
standard output is a bare edge-list file, so its configuration goes to
standard error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction

from . import experiments, graphs, moments, predict, rates, solver
from .experiments import fmt_number
from .rates import DomainError, RateParams


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _rational(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a decimal or fraction: {text!r}") from None
    return value


def _probability(text: str) -> float:
    value = _rational(text)
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"probability must lie in [0, 1], got {text}")
    return float(value)


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _k_range(text: str) -> range:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError("expected KMIN:KMAX")
    return range(int(lo), int(hi) + 1)


class _HelpFormatter(argparse.ArgumentDefaultsHelpFormatter):
    # required flags have no default; some help strings spell theirs out
    def _get_help_string(self, action):
        text = action.help or ""
        if action.required or "(default:" in text:
            return text
        return super()._get_help_string(action)


def build_parser() -> argparse.ArgumentParser:
    fmt = _HelpFormatter
    parser = _Parser(prog="tsparsity", description="t-sparsity number of dense random graphs", formatter_class=fmt, allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_):
        return sub.add_parser(name, help=help_, description=help_, formatter_class=fmt, allow_abbrev=False)

    r = add("rates", "rate function, binomial tails and related solves")
    what = r.add_mutually_exclusive_group(required=True)
    what.add_argument("--lambda-star", action="store_true", help="rate function at --x")
    what.add_argument("--cdf", action="store_true", help="exact ln Pr(Bin(--trials, p) <= --r)")
    what.add_argument("--tail-bounds", action="store_true", help="log lower/upper tail bounds")
    what.add_argument("--sparse-prob", action="store_true", help="ln Pr(fixed --k set is --t sparse)")
    what.add_argument("--psi", action="store_true", help="solve lambda_star(psi p) = (1-xi) ln b")
    what.add_argument("--expansion", action="store_true", help="exact vs approximate rate shift")
    r.add_argument("--p", type=_probability, required=True, help="edge probability")
    r.add_argument("--x", type=float, default=None, help="rate function argument")
    r.add_argument("--trials", type=int, default=None, help="binomial trials N")
    r.add_argument("--r", type=float, default=None, help="binomial threshold")
    r.add_argument("--lower-constant", type=float, default=rates.DEFAULT_LOWER_CONSTANT, help="tail lower-bound constant")
    r.add_argument("--k", type=int, default=None, help="set size")
    r.add_argument("--t", type=_rational, default=None, help="average-degree bound")
    r.add_argument("--mode", choices=("exact", "upper", "lower"), default="exact", help="sparse-prob mode")
    r.add_argument("--c0", type=float, default=rates.DEFAULT_C0, help="additive constant of the lower mode")
    r.add_argument("--xi", type=float, default=None, help="tilt parameter in (0,1)")
    r.add_argument("--eps", type=float, default=None, help="relative shift in [-1,1]")
    r.add_argument("--out", default=None, help="output path (default: stdout)")

    pr = add("predict", "closed-form location and concentration interval")
    pr.add_argument("--n", type=int, required=True, help="number of vertices")
    pr.add_argument("--p", type=_probability, required=True, help="edge probability")
    pr.add_argument("--t", type=_rational, required=True, help="average-degree bound")
    pr.add_argument("--delta", type=float, default=0.3, help="interval half-width")
    pr.add_argument("--reference", action="store_true", help="append the coarse regime references")
    pr.add_argument("--out", default=None, help="output path (default: stdout)")

    sa = add("sample", "sample G(n,p) as an edge list")
    sa.add_argument("--n", type=int, required=True, help="number of vertices")
    sa.add_argument("--p", type=_probability, required=True, help="edge probability")
    sa.add_argument("--seed", type=_seed, default=0, help="64-bit seed")
    sa.add_argument("--out", default=None, help="output path (default: stdout)")

    so = add("solve", "t-sparsity number of a graph file")
    so.add_argument("--in", dest="infile", required=True, help="edge-list file")
    so.add_argument("--t", type=_rational, required=True, help="average-degree bound")
    so.add_argument("--budget", type=int, default=None, help="search-node limit (default: none)")
    so.add_argument("--method", choices=("exact", "bruteforce", "greedy"), default="exact", help="algorithm")
    so.add_argument("--p", type=_probability, default=None, help="treat the graph as a G(n,p) sample to seed the search")
    so.add_argument("--timing", action="store_true", help="append wall-clock millis (output no longer reproducible)")
    so.add_argument("--out", default=None, help="output path (default: stdout)")

    mo = add("moments", "first-moment scan or Janson second-moment bound")
    mo.add_argument("--n", type=int, required=True, help="number of vertices")
    mo.add_argument("--p", type=_probability, required=True, help="edge probability")
    mo.add_argument("--t", type=_rational, required=True, help="average-degree bound")
    mo.add_argument("--k", type=int, default=None, help="set size (default: floor(alpha_hat - delta))")
    mo.add_argument("--delta", type=float, default=0.3, help="offset used for the default k")
    mo.add_argument("--eps", type=float, default=moments.DEFAULT_EPS, help="overlap regime split, in (0, 1/4)")
    mo.add_argument("--xi", type=float, default=moments.DEFAULT_XI, help="tilt parameter, in (0, 1)")
    mo.add_argument("--coarse-ratio", action="store_true", help="use 2^(2k+1)(k/n)^l for middle overlaps")
    mo.add_argument("--scan", type=_k_range, default=None, metavar="KMIN:KMAX", help="emit a first-moment scan instead")
    mo.add_argument("--format", choices=("csv", "jsonl"), default="csv", help="scan output format")
    mo.add_argument("--out", default=None, help="output path (default: stdout)")

    ex = add("experiment", "Monte Carlo two-point concentration check")
    ex.add_argument("--n", type=int, required=True, help="number of vertices")
    ex.add_argument("--p", type=_probability, required=True, help="edge probability")
    ex.add_argument("--t", type=_rational, required=True, help="average-degree bound")
    ex.add_argument("--delta", type=float, default=0.3, help="interval half-width")
    ex.add_argument("--samples", type=int, default=50, help="number of sampled graphs")
    ex.add_argument("--seed", type=_seed, default=0, help="64-bit master seed")
    ex.add_argument("--budget", type=int, default=None, help="search-node limit per sample (default: none)")
    ex.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    ex.add_argument("--format", choices=("csv", "jsonl"), default="csv", help="output format")
    ex.add_argument("--out", default=None, help="output path (default: stdout)")
    return parser


def _header(command: str, settings: dict) -> str:
    lines = [f"# command={command}"]
    lines += [f"# {key}={fmt_number(value)}" for key, value in settings.items()]
    return "".join(line + "\n" for line in lines)


def _table(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt_number(v) for v in row])
    return buf.getvalue()


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"tsparsity {args.command}: error: missing {', '.join(missing)}")


def _cmd_rates(args) -> str:
    params = RateParams(args.p)
    settings = {"p": args.p}
    if args.lambda_star:
        _need(args, "x")
        settings["x"] = args.x
        return _header("rates lambda-star", settings) + _table(["lambda_star"], [[rates.lambda_star(args.x, params)]])
    if args.cdf:
        _need(args, "trials", "r")
        settings.update(trials=args.trials, r=args.r)
        val = rates.binom_cdf_log(args.trials, args.r, params)
        return _header("rates cdf", settings) + _table(["log_cdf"], [[val]])
    if args.tail_bounds:
        _need(args, "trials", "r")
        settings.update(trials=args.trials, r=args.r, lower_constant=args.lower_constant)
        lo, hi = rates.binom_tail_bounds(args.trials, args.r, params, args.lower_constant)
        exact = rates.binom_cdf_log(args.trials, args.r, params)
        return _header("rates tail-bounds", settings) + _table(["log_lower", "log_cdf", "log_upper"], [[lo, exact, hi]])
    if args.sparse_prob:
        _need(args, "k", "t")
        settings.update(k=args.k, t=str(args.t), mode=args.mode, c0=args.c0)
        val = rates.sparse_prob(args.k, args.t, params, args.mode, args.c0)
        return _header("rates sparse-prob", settings) + _table(["log_prob"], [[val]])
    if args.psi:
        _need(args, "xi")
        settings["xi"] = args.xi
        psi = rates.psi_solve(params, args.xi)
        residual = rates.lambda_star(psi * args.p, params) - (1 - args.xi) * params.ln_b
        return _header("rates psi", settings) + _table(["psi", "residual"], [[psi, residual]])
    _need(args, "t", "k", "eps")
    settings.update(t=str(args.t), k=args.k, eps=args.eps)
    exact, approx = rates.lambda_expansion_check(float(args.t), args.k, params, args.eps)
    return _header("rates expansion", settings) + _table(["exact_shift", "approx_shift"], [[exact, approx]])


def _cmd_predict(args) -> str:
    params = RateParams(args.p)
    pred = predict.predict(args.n, args.t, params, args.delta)
    rec = pred.as_record()
    columns, row = list(rec), list(rec.values())
    if args.reference:
        small, large = predict.regime_reference(args.n, args.t, params)
        columns += ["small_t_upper", "large_t_value"]
        row += [small, large]
    settings = {"n": args.n, "p": args.p, "t": str(args.t), "delta": args.delta}
    return _header("predict", settings) + _table(columns, [row])


def _cmd_sample(args) -> str:
    graph = graphs.gnp_sample(args.n, args.p, args.seed)
    sys.stderr.write(_header("sample", {"n": args.n, "p": args.p, "seed": args.seed}))
    return graphs.format_graph(graph)


def _cmd_solve(args) -> str:
    graph = graphs.read_graph(args.infile)
    if args.method == "exact":
        params = RateParams(args.p) if args.p is not None else None
        res = solver.sparsity_exact(graph, args.t, args.budget, params)
    elif args.method == "bruteforce":
        res = solver.sparsity_bruteforce(graph, args.t)
    else:
        res = solver.greedy_peel(graph, args.t)
    rec = res.as_record(timing=args.timing)
    settings = {"in": args.infile, "n": graph.n, "m": graph.num_edges, "t": str(args.t),
                "method": args.method, "budget": args.budget, "p": args.p}
    return _header("solve", settings) + _table(list(rec), [list(rec.values())])


def _cmd_moments(args) -> str:
    params = RateParams(args.p)
    if args.scan is not None:
        scan = experiments.moment_scan(args.n, params, args.t, args.scan)
        if args.format == "jsonl":
            return experiments.to_jsonl(scan)
        head = _header("moments scan", {"k_min": args.scan.start, "k_max": args.scan.stop - 1})
        return head + experiments.scan_csv(scan)
    k = args.k
    if k is None:
        k = predict.concentration_interval(args.n, args.t, params, args.delta).k_minus
    report = moments.janson_report(args.n, k, args.t, params, args.eps, args.xi, args.coarse_ratio)
    settings = {"n": args.n, "p": args.p, "t": str(args.t), "k": k, "eps": args.eps, "xi": args.xi,
                "coarse_ratio": args.coarse_ratio, "log_E_exact": report.log_E,
                "log_delta": report.log_delta, "janson_log_bound": report.log_bound}
    rows = [[r.ell, r.regime, r.log_f_upper] for r in report.rows]
    return _header("moments", settings) + _table(["ell", "regime", "log_f_upper"], rows)


def _cmd_experiment(args) -> str:
    config = experiments.ExperimentConfig(
        n=args.n, p=args.p, t=args.t, delta=args.delta, samples=args.samples,
        master_seed=args.seed, solver_budget=args.budget, workers=args.workers,
    )
    summary = experiments.run_concentration(config)
    return experiments.render(summary, args.format)


_COMMANDS = {
    "rates": _cmd_rates,
    "predict": _cmd_predict,
    "sample": _cmd_sample,
    "solve": _cmd_solve,
    "moments": _cmd_moments,
    "experiment": _cmd_experiment,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        text = _COMMANDS[args.command](args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except (DomainError, graphs.GraphFormatError, graphs.GraphValidationError, ValueError, OSError) as exc:
        print(f"tsparsity: {exc}", file=sys.stderr)
        return 1
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
