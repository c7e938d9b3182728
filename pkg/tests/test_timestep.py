import numpy as np
import pytest

from blockfd import (BlowUpError, IntegratorSpec, build_operator, evolve,
                     forcing_on_grid, get_problem, initial_condition, l2_norm,
                     make_grid, max_symbol_magnitude, ode_order_selftest,
                     sample, stability_interval)


@pytest.mark.parametrize("method,expected", [("euler", 1), ("rk4", 4), ("rk6", 6)])
def test_integrator_orders(method, expected):
    """Scalar ODE self-test guards against tableau assembly mistakes."""
    observed = ode_order_selftest(method)
    assert abs(observed - expected) < 0.1, \
        f"{method}: observed order {observed:.3f}, expected {expected}"


@pytest.mark.parametrize("method,interval", [
    ("euler", 2.0), ("rk4", 2.7853), ("rk6", 2.8561),
])
def test_stability_intervals(method, interval):
    """Negative-real-axis stability limits of the amplification factors."""
    assert abs(stability_interval(method) - interval) < 2e-3


def test_zero_time_returns_copy():
    grid = make_grid(16, 2)
    op = build_operator("block2", grid, -0.25)
    v0 = np.sin(grid.x)
    result = evolve(op, None, v0, 0.0, IntegratorSpec(method="rk4"))
    assert result.steps_taken == 0
    assert np.array_equal(result.final_state, v0)
    assert result.final_state is not v0


def test_steps_land_exactly_on_t_final():
    grid = make_grid(32, 1)
    op = build_operator("std2", grid)
    result = evolve(op, None, np.cos(grid.x), 0.7, IntegratorSpec(method="rk4"))
    assert np.isclose(result.steps_taken * result.dt_used, 0.7, rtol=0, atol=1e-15)
    # policy step never exceeded
    policy = 0.5 * stability_interval("rk4") / max_symbol_magnitude(op)
    assert result.dt_used <= policy * (1 + 1e-12)


def test_dt_override_respected():
    grid = make_grid(16, 1)
    op = build_operator("std2", grid)
    result = evolve(op, None, np.cos(grid.x), 1.0,
                    IntegratorSpec(method="rk4", dt_override=0.025))
    assert result.steps_taken == 40


def test_heat_decay_accuracy():
    """One mode decays like e^{-t}; RK4 at the stability-limited step keeps
    the time error far below the spatial one."""
    grid = make_grid(64, 1)
    op = build_operator("std2", grid)
    result = evolve(op, None, np.cos(grid.x), 1.0, IntegratorSpec(method="rk4"))
    error = l2_norm(result.final_state - np.exp(-1.0) * np.cos(grid.x))
    assert error < 1e-3  # dominated by the O(h^2) spatial term ~ 5e-4


def test_forced_problem_tracks_exact_solution():
    problem = get_problem("exp-cos")
    grid = make_grid(64, 1)
    op = build_operator("std4", grid)
    result = evolve(op, forcing_on_grid(problem, grid), initial_condition(problem, grid),
                    1.0, IntegratorSpec(method="rk4"))
    error = l2_norm(result.final_state - sample(grid, lambda x: problem.exact(x, 1.0)))
    assert error < 1e-5


def test_complex_state_preserved():
    grid = make_grid(32, 2)
    op = build_operator("block2", grid, 1 / 6)
    problem = get_problem("mode:1")
    result = evolve(op, None, initial_condition(problem, grid), 0.5,
                    IntegratorSpec(method="rk4"))
    assert np.iscomplexobj(result.final_state)
    error = l2_norm(result.final_state - sample(grid, lambda x: problem.exact(x, 0.5)))
    assert error < 5e-3  # second-order spatial error at n=32


def test_unstable_scheme_blows_up():
    """An unstable parameter grows ~e^{340 t}; the integrator reports the
    overflow as a structured failure instead of returning NaNs."""
    grid = make_grid(64, 2)
    op = build_operator("block2", grid, 0.6)
    problem = get_problem("exp-cos")
    with pytest.raises(BlowUpError) as excinfo:
        evolve(op, forcing_on_grid(problem, grid), initial_condition(problem, grid),
               3.0, IntegratorSpec(method="rk4"))
    assert excinfo.value.step > 0
    assert 0.0 < excinfo.value.time <= 3.0


def test_negative_time_rejected():
    grid = make_grid(16, 1)
    with pytest.raises(ValueError):
        evolve(build_operator("std2", grid), None, np.cos(grid.x), -1.0,
               IntegratorSpec(method="rk4"))


def test_shape_mismatch_rejected():
    grid = make_grid(16, 1)
    with pytest.raises(ValueError):
        evolve(build_operator("std2", grid), None, np.zeros(7), 1.0,
               IntegratorSpec(method="rk4"))


@pytest.mark.parametrize("kwargs", [
    dict(method="rk5"), dict(method="rk4", safety=0.0), dict(method="rk4", safety=1.5),
    dict(method="rk4", dt_override=-0.1),
])
def test_integrator_spec_validation(kwargs):
    with pytest.raises(ValueError):
        IntegratorSpec(**kwargs)


def test_max_symbol_magnitude_flat_scheme():
    """Flat second difference peaks at 4/h^2 (Nyquist); the perturbed variant
    adds |c| on top."""
    grid = make_grid(32, 1)
    assert np.isclose(max_symbol_magnitude(build_operator("std2", grid)),
                      4.0 / grid.h ** 2, rtol=1e-12)
    assert np.isclose(max_symbol_magnitude(build_operator("perturbed", grid, 1.0)),
                      4.0 / grid.h ** 2 + 1.0, rtol=1e-12)
