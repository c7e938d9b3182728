"""Manufactured-solution problems for u_t = u_xx + F on the periodic interval.

Each problem carries an exact solution and the analytically derived forcing
F = u_t - u_xx (never numerical differentiation, so forcing error cannot
contaminate spatial order measurements).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import BlockGrid, sample


@dataclass(frozen=True)
class Problem:
    """Exact solution / forcing pair; forcing None means F = 0."""

    name: str
    exact: callable
    forcing: callable | None = None
    complex_valued: bool = False


def problem_decaying_cosine() -> Problem:
    """u(x, t) = e^{-t} cos x, an unforced eigenmode of the heat equation."""
    return Problem(name="decaying-cosine",
                   exact=lambda x, t: np.exp(-t) * np.cos(x))


def problem_exp_cos() -> Problem:
    """u(x, t) = exp(cos(x - t)), a traveling profile needing a forcing term.

    With u_t = sin(x-t) u and u_xx = (sin^2(x-t) - cos(x-t)) u, the
    manufactured forcing is F = (sin + cos - sin^2)(x-t) * u.
    """
    def exact(x, t):
        return np.exp(np.cos(x - t))

    def forcing(x, t):
        phase = x - t
        return (np.sin(phase) + np.cos(phase) - np.sin(phase) ** 2) * np.exp(np.cos(phase))

    return Problem(name="exp-cos", exact=exact, forcing=forcing)


def problem_single_mode(omega: int) -> Problem:
    """u(x, t) = e^{-omega^2 t} e^{i omega x}, the complex heat-kernel mode."""
    omega = int(omega)
    return Problem(name=f"mode:{omega}",
                   exact=lambda x, t: np.exp(-omega ** 2 * t) * np.exp(1j * omega * x),
                   complex_valued=True)


def get_problem(name: str) -> Problem:
    """Look up a problem by CLI name: decaying-cosine, exp-cos, or mode:<omega>."""
    if name == "decaying-cosine":
        return problem_decaying_cosine()
    if name == "exp-cos":
        return problem_exp_cos()
    if name.startswith("mode:"):
        return problem_single_mode(int(name.split(":", 1)[1]))
    raise ValueError(f"unknown problem {name!r}; choose decaying-cosine, exp-cos or mode:<omega>")


def initial_condition(problem: Problem, grid: BlockGrid):
    """Sample u(x, 0) on the grid."""
    return sample(grid, lambda x: problem.exact(x, 0.0))


def forcing_on_grid(problem: Problem, grid: BlockGrid):
    """Return t -> F(x_i, t) on the grid, or None for unforced problems."""
    if problem.forcing is None:
        return None
    x = grid.x
    return lambda t: problem.forcing(x, t)
