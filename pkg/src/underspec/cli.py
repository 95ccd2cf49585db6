"""Command-line entry point.

Exit codes: 0 success, 1 some audit rows failed, 2 invalid input, 3 I/O error.
"""
import argparse
import configparser
import os
import sys
import time

import numpy as np

from . import csvio
from .audit import audit_rows, claim_probabilities, verdict
from .calibrate import CalibrationSpec, calibrate_s, calibration_trace
from .clf import FLAT_PRIOR, ClfParams
from .data import DEFAULT_SEED_SD, OBSERVED_RANGE, SEED_VARIANCE_RECORDS
from .errors import UnderspecError
from .grid import (DEFAULT_BASELINE, DEFAULT_THRESHOLD, GridSpec, compare_grids,
                   run_grid)
from .seg import DEFAULT_CONGRUENCE, DEFAULT_SPREAD, SegParams
from .svg import render_heatmap
from .tasks import Task

GLOBAL_SECTION = "global"


def _float_list(text):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text):
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _add_model_args(p):
    g = p.add_argument_group("model parameters")
    g.add_argument("--spread", type=float, default=DEFAULT_SPREAD,
                   help="segmentation: per-case score SD of both methods (default %(default)s)")
    g.add_argument("--congruence", type=float, default=DEFAULT_CONGRUENCE,
                   help="segmentation: score correlation r_AB; classification: P(both correct) "
                        "(default %(default)s)")
    g.add_argument("--delta", type=float, default=0.0,
                   help="seed-variance SD for both methods (default 0: off)")
    g.add_argument("--delta-a", type=float, default=None, help="seed-variance SD of A")
    g.add_argument("--delta-b", type=float, default=None, help="seed-variance SD of B")
    g.add_argument("--prior", type=_float_list, default=FLAT_PRIOR,
                   help="Dirichlet prior weights a11,a10,a01,a00 (default 1,1,1,1)")
    g.add_argument("--outer-samples", type=_positive_int, default=10_000,
                   help="accuracy perturbation draws (default %(default)s)")
    g.add_argument("--mc-samples", type=_positive_int, default=100_000,
                   help="Dirichlet draws per table with --inner mc (default %(default)s)")
    g.add_argument("--inner", choices=("exact", "mc"), default="exact",
                   help="posterior probability per table: closed form or sampling")
    g.add_argument("--counts", choices=("expected", "integer"), default="expected",
                   help="2x2 table from expected real-valued counts or largest-remainder integers")


def _deltas(args):
    d_a = args.delta if args.delta_a is None else args.delta_a
    d_b = args.delta if args.delta_b is None else args.delta_b
    return d_a, d_b


def _seg_params(args, seed_variance=True):
    d_a, d_b = _deltas(args) if seed_variance else (0.0, 0.0)
    return SegParams(args.spread, args.spread, args.congruence, d_a, d_b)


def _clf_params(args, seed_variance=True):
    d_a, d_b = _deltas(args) if seed_variance else (0.0, 0.0)
    return ClfParams(args.congruence, tuple(args.prior), d_a, d_b, args.mc_samples,
                     args.outer_samples, args.seed, args.inner, args.counts)


def _model_params(task, args, seed_variance=True):
    if task is Task.SEGMENTATION:
        return _seg_params(args, seed_variance)
    return _clf_params(args, seed_variance)


def _open_out(path):
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise FileNotFoundError(f"directory does not exist: {parent}")
    return open(path, "w", newline="", encoding="utf-8")


# subcommands

def cmd_prob(args, out):
    task = Task.parse(args.task)
    mu_a = args.mu_a
    mu_b = args.mu_b
    if mu_a is None or mu_b is None:
        raise UnderspecError("both scores are required (--mu-a/--mu-b or --acc-a/--acc-b)")
    d_a, d_b = _deltas(args)
    p0, p1 = claim_probabilities(task, mu_a, mu_b, args.n, None, d_a, d_b,
                                 _seg_params(args), _clf_params(args))
    print(f"task: {task.value}", file=out)
    print(f"p_false: {p1:.4f}", file=out)
    print(f"verdict: {verdict(p1)}", file=out)
    if d_a > 0.0 or d_b > 0.0:
        print(f"p_false_baseline: {p0:.4f}", file=out)
    if getattr(p1, "degenerate", False):
        print("note: zero standard error, boundary value returned", file=out)
    return 0


def _grid_spec(task, args, seed_variance=True):
    if args.n_values is not None:
        ns = args.n_values
    else:
        ns = np.unique(np.round(np.logspace(np.log10(args.n_min), np.log10(args.n_max),
                                            args.n_points)).astype(int))
    ds = np.linspace(0.0, args.delta_max, args.delta_points)
    return GridSpec(task, tuple(int(n) for n in ns), tuple(float(d) for d in ds),
                    args.baseline, _model_params(task, args, seed_variance), args.threshold)


def _write_grid_files(result, grid_path, contour_path, svg_path=None, comparison=None, title=None):
    with _open_out(grid_path) as f:
        csvio.write_grid(f, result.rows())
    with _open_out(contour_path) as f:
        csvio.write_contour(f, result.spec.n_values, result.contour)
    if svg_path:
        with _open_out(svg_path) as f:
            f.write(render_heatmap(result, comparison, title))


def _print_shift(shifts, out):
    def cell(v):
        return "      -" if v is None else f"{v:7.4f}"
    print("      n  baseline  underspec    shift", file=out)
    for s in shifts:
        print(f"{s.n:7d}   {cell(s.baseline)}    {cell(s.underspec)}  {cell(s.shift)}", file=out)


def _contour_path(grid_path):
    root, ext = os.path.splitext(grid_path)
    return f"{root}_contour{ext or '.csv'}"


def cmd_grid(args, out):
    task = Task.parse(args.task)
    spec = _grid_spec(task, args)
    result = run_grid(spec, args.workers)
    comparison = None
    if spec.model_params.underspecified and not args.no_compare:
        comparison = run_grid(_grid_spec(task, args, seed_variance=False), args.workers)
    _write_grid_files(result, args.out, args.contour or _contour_path(args.out), args.svg,
                      comparison, f"{task.value}, delta = {spec.seed_delta:g}")
    print(f"wrote {len(spec.delta_values)} x {len(spec.n_values)} grid to {args.out}", file=out)
    if result.smoothed:
        print(f"monotone cleanup adjusted {result.smoothed} cells", file=out)
    if comparison is not None:
        _print_shift(compare_grids(comparison, result), out)
    return 0


def cmd_figure(args, out):
    """All four panels: both tasks, with and without seed variance."""
    os.makedirs(args.outdir, exist_ok=True)
    start = time.perf_counter()
    for task in (Task.SEGMENTATION, Task.CLASSIFICATION):
        base = run_grid(_grid_spec(task, args, seed_variance=False), args.workers)
        under = run_grid(_grid_spec(task, args), args.workers)
        for tag, res, cmp in (("baseline", base, None), ("underspec", under, base)):
            stem = os.path.join(args.outdir, f"{task.short}_{tag}")
            _write_grid_files(res, stem + ".csv", stem + "_contour.csv", stem + ".svg", cmp,
                              f"{task.value}, delta = {res.spec.seed_delta:g}")
        print(f"{task.value}:", file=out)
        _print_shift(compare_grids(base, under), out)
    print(f"elapsed: {time.perf_counter() - start:.1f} s", file=out)
    return 0


def cmd_calibrate(args, out):
    task = Task.parse(args.task)
    with open(args.refs, newline="", encoding="utf-8") as f:
        refs = csvio.read_references(f)
    spec = CalibrationSpec(task, args.s_min, args.s_max, args.steps,
                           _model_params(task, args), args.refine)
    if args.trace:
        trace = calibration_trace(spec, refs, args.workers)
        with _open_out(args.trace) as f:
            csvio.write_trace(f, trace)
    s_best, sse = calibrate_s(spec, refs, args.workers)
    print(f"s_best: {s_best:.4f}", file=out)
    print(f"sse: {sse:.4e}", file=out)
    return 0


def cmd_audit(args, out):
    parsed, failures = [], []
    with open(args.input, newline="", encoding="utf-8") as f:
        for line, row in csvio.read_audit(f):
            if isinstance(row, Exception):
                failures.append((line, str(row)))
            else:
                parsed.append(row)
    results = []
    for row, res in audit_rows(parsed, _seg_params(args, False), _clf_params(args, False)):
        if isinstance(res, Exception):
            failures.append((row.line, f"line {row.line}: {res}"))
        else:
            results.append((row.raw,) + res)
    with _open_out(args.output) as f:
        csvio.write_audit(f, results)
    print(f"audited {len(results)} rows -> {args.output}", file=out)
    for _, msg in sorted(failures):
        print(f"error: {msg}", file=sys.stderr)
    return 1 if failures else 0


def cmd_deltas(args, out):
    print(f"{'task':<15} {'dataset':<18} {'n_train':>7} {'n_test':>6} "
          f"{'sigma_indiv':>11} {'sigma_ensemble':>14}", file=out)
    for r in SEED_VARIANCE_RECORDS:
        ens = "n/a" if r.sigma_ensemble is None else f"{r.sigma_ensemble:.3f}"
        print(f"{r.task_kind.value:<15} {r.name:<18} {r.n_train:>7} {r.n_test:>6} "
              f"{r.sigma_indiv:>11.3f} {ens:>14}", file=out)
    print(f"default delta: {DEFAULT_SEED_SD} (median of the individual-model SDs)", file=out)
    print(f"observed range: {OBSERVED_RANGE[0]}-{OBSERVED_RANGE[1]}", file=out)
    return 0


# parser and config

def _grid_args(p):
    p.add_argument("--n-min", type=int, default=10)
    p.add_argument("--n-max", type=int, default=10_000)
    p.add_argument("--n-points", type=_positive_int, default=30)
    p.add_argument("--n-values", type=_int_list, default=None,
                   help="explicit comma-separated test-set sizes (overrides --n-min/max/points)")
    p.add_argument("--delta-max", type=float, default=0.10)
    p.add_argument("--delta-points", type=_positive_int, default=50)
    p.add_argument("--baseline", type=float, default=DEFAULT_BASELINE,
                   help="classification: accuracy of B (default %(default)s)")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)


def _add_common(p, top):
    # subcommands get their own SUPPRESS-default copies: a shared action
    # would carry the top-level default into the subcommand namespace and
    # mask a flag given before the subcommand
    seed, workers, config = (42, 1, None) if top else (argparse.SUPPRESS,) * 3
    p.add_argument("--seed", type=int, default=seed,
                   help="seed for all sampling (default 42)")
    p.add_argument("--workers", type=_positive_int, default=workers,
                   help="threads for grid cells and outer draws (default 1)")
    p.add_argument("--config", default=config,
                   help="INI file whose sections mirror the subcommand flags")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="underspec",
        description="Probability that a claimed improvement between two models is false.")
    _add_common(parser, top=True)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("prob", help="false-claim probability of one comparison")
    _add_common(p, top=False)
    p.add_argument("task", help="seg or clf")
    p.add_argument("--mu-a", "--acc-a", dest="mu_a", type=float, help="score of the claimed-better A")
    p.add_argument("--mu-b", "--acc-b", dest="mu_b", type=float, help="score of B")
    p.add_argument("--n", type=int, required=True, help="test-set size")
    _add_model_args(p)
    p.set_defaults(func=cmd_prob)

    p = sub.add_parser("grid", help="sweep (n, difference) and write CSV/SVG")
    _add_common(p, top=False)
    p.add_argument("task", help="seg or clf")
    p.add_argument("--out", required=True, help="grid CSV path")
    p.add_argument("--contour", help="contour CSV path (default: <out>_contour.csv)")
    p.add_argument("--svg", help="heatmap SVG path")
    p.add_argument("--no-compare", action="store_true",
                   help="skip the seed-variance-free grid used for the dashed contour")
    _grid_args(p)
    _add_model_args(p)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("figure", help="all four panels into a directory")
    _add_common(p, top=False)
    p.add_argument("--outdir", required=True)
    _grid_args(p)
    _add_model_args(p)
    p.set_defaults(func=cmd_figure, delta=DEFAULT_SEED_SD)

    p = sub.add_parser("calibrate", help="grid-search the spread parameter")
    _add_common(p, top=False)
    p.add_argument("task", help="seg or clf")
    p.add_argument("--refs", required=True, help="reference CSV with header n,delta,target_prob")
    p.add_argument("--s-min", type=float, default=0.05)
    p.add_argument("--s-max", type=float, default=0.5)
    p.add_argument("--steps", type=int, default=451)
    p.add_argument("--refine", action="store_true", help="one extra half-step probe around the optimum")
    p.add_argument("--trace", help="write every candidate's SSE to this CSV")
    _add_model_args(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("audit", help="annotate a CSV of reported claims")
    _add_common(p, top=False)
    p.add_argument("input")
    p.add_argument("output")
    _add_model_args(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("deltas", help="print the built-in seed-variance records")
    _add_common(p, top=False)
    p.set_defaults(func=cmd_deltas)
    return parser


def _subparsers(parser):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices
    return {}


def _apply_config(parser, path):
    """Turn INI values into parser defaults; command-line flags still win."""
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as f:
            cp.read_file(f)
    except configparser.Error as exc:
        raise UnderspecError(f"cannot parse config {path}: {exc}") from None
    subs = _subparsers(parser)
    for section in cp.sections():
        if section == GLOBAL_SECTION:
            # subcommand parsers keep SUPPRESS defaults so they never mask these
            targets = [parser]
            allowed = {"seed", "workers"}
        elif section in subs:
            targets = [subs[section]]
            allowed = None
        else:
            raise UnderspecError(f"config {path}: unknown section [{section}]")
        for key, value in cp.items(section):
            dest = key.replace("-", "_")
            if allowed is not None and dest not in allowed:
                raise UnderspecError(f"config {path}: [{section}] cannot set {key!r}")
            for target in targets:
                _set_default(target, dest, value, f"config {path}: [{section}] {key}")


def _set_default(parser, dest, value, where):
    for action in parser._actions:
        if action.dest != dest or not action.option_strings:
            continue
        if action.nargs == 0:
            try:
                parsed = configparser.ConfigParser.BOOLEAN_STATES[value.lower()]
            except KeyError:
                raise UnderspecError(f"{where}: expected a boolean, got {value!r}") from None
            parser.set_defaults(**{dest: parsed})
        else:
            # argparse runs string defaults through the option's type
            parser.set_defaults(**{dest: value})
        return
    raise UnderspecError(f"{where}: unknown option")


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    try:
        if known.config:
            _apply_config(parser, known.config)
        args = parser.parse_args(argv)
        if args.seed < 0:
            raise UnderspecError("--seed must be non-negative")
        return args.func(args, out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (UnderspecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
