"""Command-line interface: single runs, convergence ladders, symbol scans.

Exit codes: 0 on success, 2 for argument parsing errors, 3 for precondition
or stability failures, 4 when a time integration blows up.  Output files go
to --output-dir, defaulting to the BLOCKFD_OUTDIR environment variable and
then the current directory.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from . import postprocess
from .analysis import stability_scan, symbol_scan
from .experiments import (DESK_LADDER, FIGURES, StabilityError, _fmt,
                          curve_filename, report_header, reproduce_figure,
                          run_convergence, write_report_csv, write_summary_csv)
from .grid import make_grid, l2_norm, sample
from .operators import SCHEMES, build_operator, stencil_cost
from .problems import forcing_on_grid, get_problem, initial_condition
from .timestep import BlowUpError, IntegratorSpec, evolve

EXIT_PRECONDITION = 3
EXIT_BLOWUP = 4


def _ladder(text: str):
    return tuple(int(part) for part in text.split(","))


def _out_dir(args) -> str:
    directory = args.output_dir or os.environ.get("BLOCKFD_OUTDIR") or "."
    os.makedirs(directory, exist_ok=True)
    return directory


def _add_common(parser, t_default=1.0):
    parser.add_argument("--scheme", required=True, choices=sorted(SCHEMES))
    parser.add_argument("--c", type=float, default=0.0,
                        help="free stencil parameter (default 0)")
    parser.add_argument("--problem", default="exp-cos",
                        help="decaying-cosine, exp-cos, or mode:<omega>")
    parser.add_argument("--integrator", choices=["euler", "rk4", "rk6"], default="rk4")
    parser.add_argument("--t-final", "--t", dest="t_final", type=float, default=t_default)
    parser.add_argument("--safety", type=float, default=0.5,
                        help="fraction of the stability-limited step to take")
    parser.add_argument("--filter", default="none",
                        help="none, spectral[:cutoff], or local[:order[:support]]")
    parser.add_argument("--output-dir", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockfd",
        description="Block finite-difference schemes for the periodic heat equation.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="evolve one problem on one grid and dump the solution")
    _add_common(run)
    run.add_argument("--n", type=int, default=64, help="even number of blocks parameter")

    conv = sub.add_parser("converge", help="error over a resolution ladder with fitted order")
    _add_common(conv)
    conv.add_argument("--n-ladder", type=_ladder, default=DESK_LADDER,
                      help="comma-separated resolutions (default 32,64,128,256)")
    conv.add_argument("--error-floor", type=float, default=None,
                      help="exclude errors below this from the order fit")

    fig = sub.add_parser("figure", help="reproduce every curve of one convergence figure")
    fig.add_argument("figure_id", choices=sorted(FIGURES))
    fig.add_argument("--n-ladder", type=_ladder, default=None)
    fig.add_argument("--full", action="store_true",
                     help="extend the ladder to 1024 points per curve")
    fig.add_argument("--safety", type=float, default=0.5)
    fig.add_argument("--output-dir", default=None)

    sym = sub.add_parser("symbol", help="eigenvalues of the block symbol over all wavenumbers")
    sym.add_argument("--scheme", required=True, choices=sorted(SCHEMES))
    sym.add_argument("--c", type=float, default=0.0)
    sym.add_argument("--n", type=int, default=32)
    sym.add_argument("--output-dir", default=None)

    fstudy = sub.add_parser("filter-study",
                            help="convergence of one scheme under several filters")
    _add_common(fstudy)
    fstudy.add_argument("--n-ladder", type=_ladder, default=DESK_LADDER)
    fstudy.add_argument("--filters", default="none,spectral,local",
                        help="comma-separated filter specs")

    sub.add_parser("cost-table", help="per-point work and bandwidth of each scheme")
    return parser


def _cmd_run(args) -> int:
    problem = get_problem(args.problem)
    grid = make_grid(args.n, SCHEMES[args.scheme].block_size)
    report = stability_scan(args.scheme, args.c, grid)
    if not report.stable:
        raise StabilityError(report)
    op = build_operator(args.scheme, grid, args.c)
    spec = IntegratorSpec(method=args.integrator, safety=args.safety)
    result = evolve(op, forcing_on_grid(problem, grid), initial_condition(problem, grid),
                    args.t_final, spec)
    v = postprocess.apply_filter(result.final_state, postprocess.parse_filter_spec(args.filter))
    exact = sample(grid, lambda x: problem.exact(x, args.t_final))
    path = os.path.join(_out_dir(args), f"run_{args.scheme}_c{args.c:g}_n{args.n}.csv")
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        if problem.complex_valued:
            writer.writerow(["x", "v_re", "v_im", "exact_re", "exact_im", "error_abs"])
            for x, vi, ui in zip(grid.x, v, exact):
                writer.writerow([_fmt(x), _fmt(vi.real), _fmt(vi.imag),
                                 _fmt(ui.real), _fmt(ui.imag), _fmt(abs(vi - ui))])
        else:
            writer.writerow(["x", "v", "exact", "error"])
            for x, vi, ui in zip(grid.x, v.real, exact.real):
                writer.writerow([_fmt(x), _fmt(vi), _fmt(ui), _fmt(vi - ui)])
    error = l2_norm(v - exact)
    print(f"wrote {path}")
    print(f"n={args.n} m_points={grid.n_points} steps={result.steps_taken} "
          f"dt={result.dt_used:.6e} error={error:.6e}")
    return 0


def _cmd_converge(args) -> int:
    report = run_convergence(args.scheme, args.c, args.problem, args.integrator,
                             args.t_final, args.n_ladder, safety=args.safety,
                             filter_spec=postprocess.parse_filter_spec(args.filter),
                             error_floor=args.error_floor)
    name = f"converge_{args.scheme}_c{args.c:g}"
    if report.filter_desc != "none":
        name += "_" + report.filter_desc.replace(":", "-")
    path = os.path.join(_out_dir(args), name + ".csv")
    write_report_csv(report, path)
    print(f"wrote {path}")
    print(report_header(report).lstrip("# "))
    print(f"fitted order {report.fitted_order:.3f} (fit residual {report.fit_residual:.2e})")
    return 0


def _cmd_figure(args) -> int:
    reports = reproduce_figure(args.figure_id, n_ladder=args.n_ladder, full=args.full,
                               safety=args.safety)
    out = _out_dir(args)
    for report in reports:
        path = os.path.join(out, curve_filename(args.figure_id, report))
        write_report_csv(report, path)
        print(f"wrote {path}")
        label = f"c={report.c:g}"
        if report.filter_desc != "none":
            label += f" filter={report.filter_desc}"
        print(f"  {report.scheme} {label}: order {report.fitted_order:.3f}")
    summary = os.path.join(out, f"figure{args.figure_id}_summary.csv")
    write_summary_csv(reports, summary)
    print(f"wrote {summary}")
    return 0


def _cmd_symbol(args) -> int:
    grid = make_grid(args.n, SCHEMES[args.scheme].block_size)
    op = build_operator(args.scheme, grid, args.c)
    symbols = symbol_scan(op)
    m = grid.block_size
    path = os.path.join(_out_dir(args), f"symbol_{args.scheme}_c{args.c:g}_n{args.n}.csv")
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        header = ["omega", "nu"]
        header += [f"re_lambda_{k}" for k in range(m)]
        header += [f"im_lambda_{k}" for k in range(m)]
        header.append("cos_angle")
        writer.writerow(header)
        for symbol in symbols:
            row = [symbol.omega, symbol.nu]
            row += [_fmt(float(ev.real)) for ev in symbol.eigenvalues]
            row += [_fmt(float(ev.imag)) for ev in symbol.eigenvalues]
            row.append(_fmt(symbol.cos_angle()) if m == 2 else "nan")
            writer.writerow(row)
    report = stability_scan(args.scheme, args.c, grid)
    print(f"wrote {path}")
    print(f"stable={str(report.stable).lower()} max_real_part={report.max_real_part:.6e} "
          f"max_abs_imag={report.max_abs_imag:.6e}")
    return 0


def _cmd_filter_study(args) -> int:
    out = _out_dir(args)
    reports = []
    for text in args.filters.split(","):
        spec = postprocess.parse_filter_spec(text.strip())
        report = run_convergence(args.scheme, args.c, args.problem, args.integrator,
                                 args.t_final, args.n_ladder, safety=args.safety,
                                 filter_spec=spec)
        reports.append(report)
        name = f"filterstudy_{args.scheme}_c{args.c:g}_" + report.filter_desc.replace(":", "-")
        path = os.path.join(out, name + ".csv")
        write_report_csv(report, path)
        print(f"wrote {path}")
        print(f"  filter={report.filter_desc}: order {report.fitted_order:.3f}")
    summary = os.path.join(out, f"filterstudy_{args.scheme}_c{args.c:g}_summary.csv")
    write_summary_csv(reports, summary)
    print(f"wrote {summary}")
    return 0


def _mixed(fraction) -> str:
    whole, rem = divmod(fraction.numerator, fraction.denominator)
    if rem == 0:
        return str(whole)
    if whole == 0:
        return f"{rem}/{fraction.denominator}"
    return f"{whole} {rem}/{fraction.denominator}"


#: (scheme, c) rows of the work/bandwidth comparison table.
COST_TABLE_ROWS = (
    ("std2", 0.0), ("std4", 0.0), ("std6", 0.0),
    ("block2", -0.25), ("block3-low", 1.340), ("block3-high", -0.385),
    ("block3-high", 1.0),
)


def _cmd_cost_table(args) -> int:
    print(f"{'scheme':<12} {'c':>7} {'mults/pt':>9} {'adds/pt':>9} {'pts/side':>9}")
    for scheme, c in COST_TABLE_ROWS:
        grid = make_grid(16, SCHEMES[scheme].block_size)
        cost = stencil_cost(build_operator(scheme, grid, c))
        print(f"{scheme:<12} {c:>7g} {_mixed(cost.mults):>9} "
              f"{_mixed(cost.adds):>9} {cost.points_per_side:>9}")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "converge": _cmd_converge,
    "figure": _cmd_figure,
    "symbol": _cmd_symbol,
    "filter-study": _cmd_filter_study,
    "cost-table": _cmd_cost_table,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except BlowUpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BLOWUP


if __name__ == "__main__":
    sys.exit(main())
