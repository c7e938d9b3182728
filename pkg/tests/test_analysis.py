import numpy as np
import pytest

from blockfd import (IntegratorSpec, alias_identity_residuals, alias_wavenumber,
                     build_operator, closed_form_block2_eigs,
                     consistency_eigenvalue, evolve, fit_order,
                     fitted_q1_curvature, get_problem, initial_condition,
                     l2_norm, make_grid, modal_evolution_prediction,
                     numeric_block_symbol, perturbed_error_mode_check,
                     perturbed_pair_symbol, predicted_q1_curvature,
                     stability_scan, truncation_order)


# ---------------------------------------------------------------------------
# aliasing
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("omega,n,nu", [(1, 16, -16), (8, 16, -9), (-3, 16, 14), (0, 16, 17)])
def test_alias_wavenumber_values(omega, n, nu):
    assert alias_wavenumber(omega, n) == nu


def test_alias_wavenumber_band_limit():
    with pytest.raises(ValueError):
        alias_wavenumber(9, 16)


@pytest.mark.parametrize("omega", [1, 3, 8, -5])
def test_alias_identities_hold_to_roundoff(omega):
    """e^{i omega x} and e^{i nu x} agree at integer nodes and differ by a
    sign at half nodes -- the mechanism that couples the two wavenumbers."""
    grid = make_grid(16, 2)
    res_int, res_half = alias_identity_residuals(grid, omega)
    assert res_int < 1e-12, f"omega={omega}: integer-node identity residual {res_int:.2e}"
    assert res_half < 1e-12, f"omega={omega}: half-node identity residual {res_half:.2e}"


# ---------------------------------------------------------------------------
# block symbol
# ---------------------------------------------------------------------------

def test_symbol_matches_dense_spectrum():
    """Union of symbol eigenvalues over omega = spectrum of the full matrix."""
    grid = make_grid(8, 2)
    op = build_operator("block2", grid, 1 / 6)
    from_symbol = []
    for omega in range(-(grid.n // 2), grid.n // 2 + 1):
        from_symbol.extend(numeric_block_symbol(op, omega).eigenvalues)
    dense = np.linalg.eigvals(op.dense_matrix())
    # both unordered complex sets; compare sorted real parts (imag ~ 0)
    a = np.sort(np.real(from_symbol))
    b = np.sort(np.real(dense))
    assert np.max(np.abs(a - b)) < 1e-9 * np.max(np.abs(b))


@pytest.mark.parametrize("scheme,c", [("block2", 0.0), ("block2", -0.25),
                                      ("block3-high", -0.385), ("std4", 0.0)])
def test_consistency_eigenvalue_tends_to_minus_omega_squared(scheme, c):
    from blockfd import SCHEMES
    for omega in (1, 2, 3):
        gaps = []
        for n in (32, 64, 128):
            grid = make_grid(n, SCHEMES[scheme].block_size)
            lam = consistency_eigenvalue(build_operator(scheme, grid, c), omega)
            gaps.append(abs(lam - (-omega ** 2)))
        assert gaps[2] < gaps[1] < gaps[0], \
            f"{scheme} c={c} omega={omega}: gaps {gaps} not shrinking"
        assert gaps[2] < 0.05 * omega ** 2 + 1e-12


def test_eigenvalues_sorted_descending_real():
    symbol = numeric_block_symbol(build_operator("block3-high", make_grid(16, 3), -0.385), 5)
    real = symbol.eigenvalues.real
    assert np.all(np.diff(real) <= 1e-12)


# ---------------------------------------------------------------------------
# closed-form two-point eigensystem
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("c", [0.3, -0.3, 1 / 6, -1 / 6, -0.25, 0.0])
@pytest.mark.parametrize("n", [16, 32, 64])
def test_closed_form_eigenvalues_match_numeric(c, n):
    grid = make_grid(n, 2)
    op = build_operator("block2", grid, c)
    scale = (2.0 / grid.h) ** 2
    for omega in range(-(n // 2), n // 2 + 1):
        eigs = closed_form_block2_eigs(c, omega, grid)
        numeric = numeric_block_symbol(op, omega).eigenvalues
        for q, lam in ((eigs.q1, numeric[0]), (eigs.q2, numeric[1])):
            rel = abs(q - lam) / max(1.0, abs(lam))
            assert rel < 1e-10, f"c={c} n={n} omega={omega}: eigenvalue mismatch {rel:.2e}"
        assert np.max(np.abs(numeric.imag)) <= 1e-10 * scale, \
            f"c={c} n={n} omega={omega}: eigenvalues not real"


@pytest.mark.parametrize("c", [0.3, -0.25, 1 / 6])
@pytest.mark.parametrize("omega", [1, 3, 7])
def test_closed_form_vectors_are_eigenvectors(c, omega):
    """Reconstruct block amplitudes from (alpha, beta) and check S p = q p."""
    grid = make_grid(16, 2)
    matrix = build_operator("block2", grid, c).fourier_symbol(omega)
    eigs = closed_form_block2_eigs(c, omega, grid)
    assert not eigs.vector_fallback
    for q, alpha, beta in ((eigs.q1, eigs.alpha1, eigs.beta1),
                           (eigs.q2, eigs.alpha2, eigs.beta2)):
        p = np.array([alpha + beta, alpha - beta])
        residual = np.linalg.norm(matrix @ p - q * p) / np.linalg.norm(matrix @ p)
        assert residual < 1e-9, f"c={c} omega={omega}: eigenvector residual {residual:.2e}"


def test_closed_form_vector_fallback_flagged():
    grid = make_grid(16, 2)
    assert closed_form_block2_eigs(0.3, 0, grid).vector_fallback  # omega = 0
    assert closed_form_block2_eigs(0.0, 3, grid).vector_fallback  # c = 0
    assert not closed_form_block2_eigs(0.3, 3, grid).vector_fallback


@pytest.mark.parametrize("c", [0.0, 1 / 6, -1 / 6])
@pytest.mark.parametrize("omega", [1, 2, 3])
def test_q1_curvature_matches_prediction(c, omega):
    """Fitted s^2 coefficient of q1 + omega^2 agrees with (1+4c) omega^4 / (12-24c)."""
    fitted = fitted_q1_curvature(c, omega)
    predicted = predicted_q1_curvature(c, omega)
    assert abs(fitted - predicted) <= 0.05 * abs(predicted), \
        f"c={c} omega={omega}: fitted {fitted:.6g} vs predicted {predicted:.6g}"


@pytest.mark.parametrize("omega", [1, 2, 3])
def test_q1_curvature_vanishes_at_quarter(omega):
    """At c = -1/4 the s^2 term cancels, the root cause of the order bump."""
    assert abs(fitted_q1_curvature(-0.25, omega)) < 0.05 * abs(fitted_q1_curvature(0.0, omega))


# ---------------------------------------------------------------------------
# stability scans
# ---------------------------------------------------------------------------

STABLE = [
    ("perturbed", 0.0), ("perturbed", 0.5), ("perturbed", 1.0),
    ("block2", 0.0), ("block2", 1 / 6), ("block2", -1 / 6), ("block2", -0.25),
    ("block3-low", 0.0), ("block3-low", 1.340),
    ("block3-high", 0.0), ("block3-high", -0.385), ("block3-high", 1.0),
    ("std2", 0.0), ("std4", 0.0), ("std6", 0.0),
]


@pytest.mark.parametrize("scheme,c", STABLE)
def test_reference_parameters_are_stable(scheme, c):
    from blockfd import SCHEMES
    report = stability_scan(scheme, c, make_grid(32, SCHEMES[scheme].block_size))
    assert report.stable, (f"{scheme} c={c}: max Re {report.max_real_part:.3e}, "
                           f"max |Im| {report.max_abs_imag:.3e}")


def test_unstable_parameter_detected():
    report = stability_scan("block2", 0.6, make_grid(32, 2))
    assert not report.stable
    assert report.max_real_part > 1.0


def test_two_point_eigenvector_geometry_reported():
    """The two symbol eigenvectors are far from parallel but not orthogonal;
    the report tracks |cos angle| range and conditioning of the vector basis."""
    report = stability_scan("block2", -0.25, make_grid(32, 2))
    assert report.min_cos_angle is not None
    assert 0.0 <= report.min_cos_angle <= report.max_cos_angle < 0.5
    assert report.max_vector_condition < 100.0


def test_perturbed_pair_symbol_growth_is_capped():
    """Coupled-pair eigenvalues exceed 0 by only O(c^2 h^2), far below |c|."""
    grid = make_grid(64, 1)
    c = 1.0
    worst = max(np.linalg.eigvalsh(perturbed_pair_symbol(grid, c, omega)).max()
                for omega in range(-grid.n // 2 + 1, grid.n // 2 + 1))
    assert 0.0 < worst < c ** 2 * grid.h ** 2  # measured ~ c^2 h^2 / 4
    assert worst < abs(c)


# ---------------------------------------------------------------------------
# order fitting
# ---------------------------------------------------------------------------

def test_fit_order_exact_power_law():
    sizes = [32, 64, 128, 256]
    errors = [10.0 * m ** -3.0 for m in sizes]
    fit = fit_order(sizes, errors)
    assert abs(fit.order - 3.0) < 1e-12
    assert fit.residual_rms < 1e-14
    assert not fit.dropped_coarsest


def test_fit_order_drops_preasymptotic_coarsest():
    sizes = [32, 64, 128, 256]
    errors = [10.0 * m ** -3.0 for m in sizes]
    errors[0] *= 2.0  # coarse point off the line by 100%
    fit = fit_order(sizes, errors)
    assert fit.dropped_coarsest
    assert abs(fit.order - 3.0) < 1e-12


def test_fit_order_error_floor():
    sizes = [32, 64, 128, 256]
    errors = [1e-2, 1e-4, 1e-13, 1e-13]  # last two saturated at round-off
    fit = fit_order(sizes, errors, error_floor=1e-12)
    assert fit.n_used == 2
    assert abs(fit.order - np.log2(100) / 1.0) < 1e-6  # slope between first two


def test_fit_order_needs_two_points():
    with pytest.raises(ValueError):
        fit_order([64], [1e-3])


# ---------------------------------------------------------------------------
# truncation order vs solution order
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("scheme,c,expected", [
    ("block2", 0.3, 1.0),        # deformed rows only cancel to O(h)
    ("block2", -0.25, 1.0),
    ("block2", 0.0, 2.0),        # plain second difference
    ("block3-high", -0.385, 3.0),  # outer rows dominate at O(h^3)
    ("std4", 0.0, 4.0),
])
def test_truncation_orders(scheme, c, expected):
    from blockfd import SCHEMES
    op = build_operator(scheme, make_grid(16, SCHEMES[scheme].block_size), c)
    estimate = truncation_order(op)
    assert abs(estimate.observed_order - expected) < 0.25, \
        f"{scheme} c={c}: truncation order {estimate.observed_order:.3f}, expected {expected}"


# ---------------------------------------------------------------------------
# modal evolution prediction
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("c,omega,n", [
    (0.0, 1, 32), (0.3, 1, 32), (-0.25, 1, 64), (0.3, 2, 64), (-0.25, 2, 128),
])
def test_modal_prediction_matches_integrator(c, omega, n):
    """Two-term symbol expansion tracks the actual evolution of one mode."""
    grid = make_grid(n, 2)
    op = build_operator("block2", grid, c)
    problem = get_problem(f"mode:{omega}")
    result = evolve(op, None, initial_condition(problem, grid), 0.5,
                    IntegratorSpec(method="rk6", safety=0.3))
    predicted = modal_evolution_prediction(c, omega, 0.5, grid)
    rel = l2_norm(result.final_state - predicted) / l2_norm(predicted)
    assert rel < 1e-4, f"c={c} omega={omega} n={n}: prediction off by {rel:.2e}"


def test_modal_prediction_residual_scales_like_h4():
    rels = []
    for n in (64, 128):
        grid = make_grid(n, 2)
        op = build_operator("block2", grid, 0.3)
        problem = get_problem("mode:2")
        result = evolve(op, None, initial_condition(problem, grid), 0.5,
                        IntegratorSpec(method="rk6", safety=0.3))
        rels.append(l2_norm(result.final_state - modal_evolution_prediction(0.3, 2, 0.5, grid)))
    assert rels[0] / rels[1] > 10.0, f"residual ratio {rels[0] / rels[1]:.1f}, expected ~16"


def test_modal_prediction_precondition():
    with pytest.raises(ValueError):
        modal_evolution_prediction(0.3, 3, 0.5, make_grid(32, 2))  # |omega|^3 h > 1


def test_modal_prediction_no_alias_term_at_c_zero():
    """c = 0 removes the coupling, leaving a pure consistent-branch mode."""
    grid = make_grid(64, 2)
    predicted = modal_evolution_prediction(0.0, 2, 0.5, grid)
    spectrum = np.fft.fft(predicted) / grid.n_points
    nu = alias_wavenumber(2, grid.n)
    assert abs(spectrum[nu]) < 1e-14


# ---------------------------------------------------------------------------
# perturbed-scheme error mode
# ---------------------------------------------------------------------------

def test_perturbed_error_mode_bounded():
    """Driven high-frequency error settles two orders below the O(1) residual."""
    report = perturbed_error_mode_check(1.0, make_grid(64, 1), t=1.0)
    assert report.passed, f"amplitude {report.amplitude:.3e} above bound {report.bound:.3e}"
    assert report.amplitude > 0.5 * report.bound  # equilibrium, not decayed away


def test_perturbed_error_mode_second_order_scaling():
    amp32 = perturbed_error_mode_check(1.0, make_grid(32, 1)).amplitude
    amp64 = perturbed_error_mode_check(1.0, make_grid(64, 1)).amplitude
    ratio = amp32 / amp64
    assert 3.5 < ratio < 4.5, f"doubling ratio {ratio:.2f}, expected ~4"


def test_perturbed_error_mode_linear_in_c():
    amp_half = perturbed_error_mode_check(0.5, make_grid(64, 1)).amplitude
    amp_one = perturbed_error_mode_check(1.0, make_grid(64, 1)).amplitude
    assert abs(amp_one / amp_half - 2.0) < 0.2


def test_perturbed_error_mode_zero_forcing():
    report = perturbed_error_mode_check(0.0, make_grid(32, 1))
    assert report.amplitude == 0.0
