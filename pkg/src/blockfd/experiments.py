"""Convergence-study driver: resolution ladders, error slopes, CSV reports.

A convergence run sweeps a scheme/parameter combination over a ladder of
resolutions, evolves the manufactured problem on each grid, and fits the
least-squares order of the final-time error norm.  Optional post-processing
filters are applied once, after the final step.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import postprocess
from .analysis import OrderEstimate, fit_order, stability_scan, StabilityReport
from .grid import TWO_PI, l2_norm, make_grid, sample
from .operators import SCHEMES, build_operator
from .problems import Problem, forcing_on_grid, get_problem, initial_condition
from .timestep import IntegratorSpec, evolve


class StabilityError(ValueError):
    """Raised when a requested (scheme, c) fails the symbol stability scan."""

    def __init__(self, report: StabilityReport):
        super().__init__(
            f"scheme {report.scheme} with c={report.c:g} is unstable: "
            f"max eigenvalue real part {report.max_real_part:.3e} "
            f"(allowed {report.tolerance:.3e}), max |imag| {report.max_abs_imag:.3e}")
        self.report = report


class ResolutionRow(NamedTuple):
    n: int
    m_points: int
    dt: float
    error: float


@dataclass(frozen=True)
class ConvergenceReport:
    """Errors over a resolution ladder with the fitted order slope."""

    scheme: str
    c: float
    problem: str
    integrator: str
    t_final: float
    filter_desc: str
    rows: tuple
    fitted_order: float
    fit_residual: float

    def errors(self):
        return [row.error for row in self.rows]

    def sizes(self):
        return [row.m_points for row in self.rows]


def run_convergence(scheme: str, c: float, problem, integrator: str,
                    t_final: float, n_ladder, safety: float = 0.5,
                    filter_spec=None, error_floor: float | None = None,
                    check_stability: bool = True) -> ConvergenceReport:
    """Run one convergence curve and fit its order.

    ``problem`` is a Problem or a registered problem name.  The stability
    scan runs first on the coarsest grid and unstable combinations raise
    StabilityError instead of producing garbage slopes.  ``error_floor``
    drops round-off saturated ladder points from the fit (they stay in the
    report rows).
    """
    if isinstance(problem, str):
        problem = get_problem(problem)
    n_ladder = sorted(int(n) for n in n_ladder)
    if len(n_ladder) < 3:
        raise ValueError(f"need at least 3 ladder resolutions, got {n_ladder}")
    block_size = SCHEMES[scheme].block_size
    if check_stability:
        report = stability_scan(scheme, c, make_grid(n_ladder[0], block_size))
        if not report.stable:
            raise StabilityError(report)
    spec = IntegratorSpec(method=integrator, safety=safety)
    rows = []
    for n in n_ladder:
        grid = make_grid(n, block_size)
        op = build_operator(scheme, grid, c)
        v0 = initial_condition(problem, grid)
        result = evolve(op, forcing_on_grid(problem, grid), v0, t_final, spec)
        v = postprocess.apply_filter(result.final_state, filter_spec)
        error = l2_norm(v - sample(grid, lambda x: problem.exact(x, t_final)))
        rows.append(ResolutionRow(n=n, m_points=grid.n_points, dt=result.dt_used, error=error))
    fit = fit_order([r.m_points for r in rows], [r.error for r in rows],
                    error_floor=error_floor)
    return ConvergenceReport(
        scheme=scheme, c=c, problem=problem.name, integrator=integrator,
        t_final=t_final,
        filter_desc="none" if filter_spec is None else filter_spec.describe(),
        rows=tuple(rows), fitted_order=fit.order, fit_residual=fit.residual_rms)


def filtered_convergence(scheme: str, c: float, problem, filter_spec,
                         n_ladder, integrator: str = "rk4", t_final: float = 1.0,
                         safety: float = 0.5) -> ConvergenceReport:
    """Convergence curve with a single post-processing pass after the final step."""
    return run_convergence(scheme, c, problem, integrator, t_final, n_ladder,
                           safety=safety, filter_spec=filter_spec)


def error_bound_check(report: ConvergenceReport, truncation: OrderEstimate,
                      slack: float = 1.05) -> bool:
    """Check the a-priori bound error <= t_final * ||truncation residual||.

    For a semi-bounded dissipative operator the error at time t is bounded by
    t times the largest truncation residual norm; the block schemes sit far
    below this bound (their solution order beats their truncation order),
    while classical schemes are tight in order.  ``slack`` absorbs the mild
    time variation of the residual norm over the evolution.
    """
    trunc_by_n = dict(zip(truncation.resolutions, truncation.residual_norms))
    matched = [(row.error, trunc_by_n[row.n]) for row in report.rows if row.n in trunc_by_n]
    if not matched:
        raise ValueError("no overlapping resolutions between report and truncation estimate")
    return all(error <= report.t_final * trunc * slack for error, trunc in matched)


DESK_LADDER = (32, 64, 128, 256)
FULL_LADDER = (32, 64, 128, 256, 512, 1024)

#: Figure presets: every curve of each convergence plot.
FIGURES = {
    "1a": dict(scheme="perturbed", c_values=(0.0, 0.5, 1.0), problem="decaying-cosine",
               integrator="euler", t_final=TWO_PI),
    "1b": dict(scheme="block2", c_values=(0.0, 1 / 6, -1 / 6, -0.25), problem="exp-cos",
               integrator="rk4", t_final=1.0),
    "2a": dict(scheme="block3-low", c_values=(0.0, 1.340), problem="exp-cos",
               integrator="rk4", t_final=1.0),
    "2b": dict(scheme="block3-high", c_values=(0.0, -0.385), problem="exp-cos",
               integrator="rk6", t_final=1.0, error_floor=1e-12),
    "3": dict(scheme="block2", c_values=(-0.25,), problem="exp-cos",
              integrator="rk4", t_final=1.0,
              filters=("none", "spectral", "local")),
}


def reproduce_figure(figure_id: str, n_ladder=None, full: bool = False,
                     safety: float = 0.5) -> list:
    """Run every curve of one convergence figure and return the reports."""
    if figure_id not in FIGURES:
        raise ValueError(f"unknown figure {figure_id!r}; choose from {sorted(FIGURES)}")
    preset = FIGURES[figure_id]
    if n_ladder is None:
        n_ladder = FULL_LADDER if full else DESK_LADDER
    reports = []
    for c in preset["c_values"]:
        for filter_name in preset.get("filters", ("none",)):
            reports.append(run_convergence(
                preset["scheme"], c, preset["problem"], preset["integrator"],
                preset["t_final"], n_ladder, safety=safety,
                filter_spec=postprocess.parse_filter_spec(filter_name),
                error_floor=preset.get("error_floor")))
    return reports


# ---------------------------------------------------------------------------
# CSV output (17 significant digits for round-trip fidelity)
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    return f"{value:.17g}" if isinstance(value, float) else str(value)


def report_header(report: ConvergenceReport) -> str:
    return (f"# scheme={report.scheme} c={_fmt(report.c)} problem={report.problem} "
            f"integrator={report.integrator} t_final={_fmt(report.t_final)} "
            f"filter={report.filter_desc}")


def write_report_csv(report: ConvergenceReport, path):
    """One curve: config echo line, then (n, m_points, dt, error, log10_m, log10_error)."""
    with open(path, "w", newline="") as handle:
        handle.write(report_header(report) + "\n")
        writer = csv.writer(handle)
        writer.writerow(["n", "m_points", "dt", "error", "log10_m", "log10_error"])
        for row in report.rows:
            writer.writerow([row.n, row.m_points, _fmt(row.dt), _fmt(row.error),
                             _fmt(float(np.log10(row.m_points))),
                             _fmt(float(np.log10(row.error)))])


def write_summary_csv(reports, path):
    """Fitted orders of a set of curves, one row per curve."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["scheme", "c", "problem", "integrator", "t_final",
                         "filter", "fitted_order", "fit_residual"])
        for report in reports:
            writer.writerow([report.scheme, _fmt(report.c), report.problem,
                             report.integrator, _fmt(report.t_final), report.filter_desc,
                             _fmt(report.fitted_order), _fmt(report.fit_residual)])


def curve_filename(figure_id: str, report: ConvergenceReport) -> str:
    name = f"fig{figure_id}_c{report.c:g}"
    if report.filter_desc != "none":
        name += "_" + report.filter_desc.replace(":", "-")
    return name + ".csv"
