"""Fourier-symbol analysis of the block stencil operators.

Covers the block symbol and its eigensystem (numeric for every scheme,
closed-form for the two-point block), wavenumber aliasing on block grids,
stability scans, least-squares order fitting, a truncation-order oracle,
modal evolution predictions, and the high-frequency error-mode diagnostic of
the flat perturbed scheme.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import BlockGrid, make_grid, sample, l2_norm
from .operators import StencilOperator, build_operator, build_perturbed


# ---------------------------------------------------------------------------
# wavenumber aliasing on block grids
# ---------------------------------------------------------------------------

def alias_wavenumber(omega: int, n: int) -> int:
    """Aliased companion wavenumber nu of omega on a block grid.

    On a grid of n+1 blocks the waves e^{i omega x} and e^{i nu x} coincide at
    the integer (block-anchor) nodes and differ by a sign at the half nodes:
    nu = omega - (n+1) for omega > 0, omega + (n+1) otherwise.
    """
    if abs(omega) > n // 2:
        raise ValueError(f"wavenumber {omega} outside the resolvable band |omega| <= {n // 2}")
    return omega - (n + 1) if omega > 0 else omega + (n + 1)


def alias_identity_residuals(grid: BlockGrid, omega: int) -> tuple[float, float]:
    """Max residuals of the two aliasing identities on a two-node block grid.

    Returns (max |e^{i omega x} - e^{i nu x}| over integer nodes,
             max |e^{i omega x} + e^{i nu x}| over half nodes).
    """
    if grid.block_size != 2:
        raise ValueError("aliasing identities are specific to two-node block grids")
    nu = alias_wavenumber(omega, grid.n)
    x_int, x_half = grid.x[0::2], grid.x[1::2]
    res_int = np.abs(np.exp(1j * omega * x_int) - np.exp(1j * nu * x_int)).max()
    res_half = np.abs(np.exp(1j * omega * x_half) + np.exp(1j * nu * x_half)).max()
    return float(res_int), float(res_half)


# ---------------------------------------------------------------------------
# numeric block symbol
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BlockSymbol:
    """Block Fourier symbol at one wavenumber with its eigendecomposition.

    ``eigenvalues`` are sorted by descending real part, so index 0 is the
    consistent branch (the one tending to -omega^2).  ``eigenvectors`` holds
    unit-norm columns in the block-amplitude basis.  For two-node blocks,
    ``alpha_beta[k]`` gives the coefficients of eigenvector k in the
    orthogonal wave basis (e^{i omega x}, e^{i nu x}), normalized to
    |alpha|^2 + |beta|^2 = 1.
    """

    omega: int
    nu: int | None
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    alpha_beta: tuple | None = None

    def cos_angle(self) -> float | None:
        """|cos| of the angle between the two eigenvectors in the wave basis."""
        if self.alpha_beta is None:
            return None
        (a1, b1), (a2, b2) = self.alpha_beta
        return float(abs(np.conj(a1) * a2 + np.conj(b1) * b2))


def numeric_block_symbol(op: StencilOperator, omega: int) -> BlockSymbol:
    """Eigendecomposed m x m block symbol of a stencil operator at omega."""
    matrix = op.fourier_symbol(omega)
    values, vectors = np.linalg.eig(matrix)
    order = np.argsort(-values.real, kind="stable")
    values, vectors = values[order], vectors[:, order]
    vectors = vectors / np.linalg.norm(vectors, axis=0)
    grid = op.grid
    nu = alias_wavenumber(omega, grid.n) if grid.block_size >= 2 else None
    alpha_beta = None
    if grid.block_size == 2:
        pairs = []
        for k in range(2):
            p0, p1 = vectors[0, k], vectors[1, k]
            alpha, beta = (p0 + p1) / 2.0, (p0 - p1) / 2.0
            norm = np.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
            pairs.append((alpha / norm, beta / norm))
        alpha_beta = tuple(pairs)
    return BlockSymbol(omega=omega, nu=nu, matrix=matrix, eigenvalues=values,
                       eigenvectors=vectors, alpha_beta=alpha_beta)


def symbol_scan(op: StencilOperator):
    """Block symbols at every resolvable wavenumber omega in [-n/2, n/2]."""
    half = op.grid.n // 2
    return [numeric_block_symbol(op, omega) for omega in range(-half, half + 1)]


def consistency_eigenvalue(op: StencilOperator, omega: int) -> complex:
    """Symbol eigenvalue on the consistent branch (largest real part)."""
    return complex(numeric_block_symbol(op, omega).eigenvalues[0])


# ---------------------------------------------------------------------------
# closed-form eigensystem of the two-point block scheme
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClosedFormEigs:
    """Closed-form eigensystem of the two-point block symbol.

    ``alpha``/``beta`` pairs are the eigenvector coefficients in the
    (e^{i omega x}, e^{i nu x}) wave basis, normalized to
    |alpha|^2 + |beta|^2 = 1.  ``vector_fallback`` marks wavenumbers where
    the eigenvector formulas are singular (omega = 0, or c = 0) and the
    returned vectors come from the numeric eigensolver instead.
    """

    q1: float
    q2: float
    delta: float
    alpha1: complex
    beta1: complex
    alpha2: complex
    beta2: complex
    vector_fallback: bool


def closed_form_block2_eigs(c: float, omega: int, grid: BlockGrid) -> ClosedFormEigs:
    """Evaluate the closed-form two-point block eigensystem at wavenumber omega.

    Valid for |c| < 1/2 (real eigenvalue branch).  The eigenvalues are

        q_{1,2} = (-4 + 2 c (cos 2*theta + 3) +/- delta) / (2 s^2),
        delta   = sqrt(2 c^2 cos 4*theta + 38 c^2
                       + 8 (c-1)(3c-1) cos 2*theta - 32 c + 8),

    with s the sub-spacing and theta = omega * s.  The eigenvector formulas
    divide by 2 sin(theta) + sin(2*theta) and by c, so at omega = 0 or c = 0
    the vectors fall back to the numeric eigendecomposition.
    """
    if grid.block_size != 2:
        raise ValueError("closed form applies to two-node block grids only")
    s = grid.sub_spacing
    theta = omega * s
    delta = np.sqrt(2 * c ** 2 * np.cos(4 * theta) + 38 * c ** 2
                    + 8 * (c - 1) * (3 * c - 1) * np.cos(2 * theta) - 32 * c + 8)
    shift = -4 + 2 * c * (np.cos(2 * theta) + 3)
    q1 = (shift + delta) / (2 * s ** 2)
    q2 = (shift - delta) / (2 * s ** 2)
    sden = 2 * np.sin(theta) + np.sin(2 * theta)
    if c != 0.0 and abs(sden) > 1e-12:
        cos2, cos4 = np.cos(2 * theta), np.cos(4 * theta)
        shared = 4 * (c * (7 * c - 8) + 2) * cos2 + (35 * c - 32) * c + 8
        num1 = c ** 2 * cos4 + 4 * (2 * c - 1) * delta * np.cos(theta) + shared
        num2 = c ** 2 * cos4 + 4 * (1 - 2 * c) * delta * np.cos(theta) + shared
        alpha1 = 1.0 / np.sqrt(1 + num1 / (2 * c ** 2 * sden ** 2))
        beta1 = -1j * ((8 * c - 4) * np.cos(theta) + delta) / (2 * c * sden) * alpha1
        beta2 = 1.0 / np.sqrt(1 + 2 * c ** 2 * sden ** 2 / num2)
        alpha2 = -2j * c * sden / ((4 - 8 * c) * np.cos(theta) + delta) * beta2
        vector = np.array([alpha1, beta1, alpha2, beta2])
        if np.all(np.isfinite(vector)):
            return ClosedFormEigs(q1=float(q1), q2=float(q2), delta=float(delta),
                                  alpha1=complex(alpha1), beta1=complex(beta1),
                                  alpha2=complex(alpha2), beta2=complex(beta2),
                                  vector_fallback=False)
    numeric = numeric_block_symbol(build_operator("block2", grid, c), omega)
    (alpha1, beta1), (alpha2, beta2) = numeric.alpha_beta
    return ClosedFormEigs(q1=float(q1), q2=float(q2), delta=float(delta),
                          alpha1=alpha1, beta1=beta1, alpha2=alpha2, beta2=beta2,
                          vector_fallback=True)


def predicted_q1_curvature(c: float, omega: int) -> float:
    """Leading coefficient of q1(omega) + omega^2 in powers of s^2.

    The consistent eigenvalue expands as q1 = -omega^2 + a * s^2 + O(s^4)
    with a = (1 + 4c) * omega^4 / (12 - 24c); the coefficient vanishes at
    c = -1/4, which is what raises the solution order there.
    """
    return (1 + 4 * c) * omega ** 4 / (12 - 24 * c)


def fitted_q1_curvature(c: float, omega: int, n: int = 256) -> float:
    """Measure the s^2 coefficient of q1 + omega^2 from the closed form at resolution n."""
    grid = make_grid(n, 2)
    eigs = closed_form_block2_eigs(c, omega, grid)
    return (eigs.q1 + omega ** 2) / grid.sub_spacing ** 2


# ---------------------------------------------------------------------------
# stability scans
# ---------------------------------------------------------------------------

def perturbed_pair_symbol(grid: BlockGrid, c: float, omega: int) -> np.ndarray:
    """2x2 symbol of the flat perturbed scheme on the coupled mode pair.

    Multiplying by (-1)^j maps wavenumber omega to its half-band partner
    omega + n/2 (mod n), so the scheme acts on each {omega, omega + n/2} pair
    by [[lam(omega), c], [c, lam(partner)]] with lam the plain 3-point symbol.
    """
    if grid.block_size != 1:
        raise ValueError("pair symbol applies to flat grids only")
    n, h = grid.n, grid.h

    def lam(k):
        return -(4.0 / h ** 2) * np.sin(k * h / 2.0) ** 2

    partner = omega + n // 2
    return np.array([[lam(omega), c], [c, lam(partner)]])


@dataclass(frozen=True)
class StabilityReport:
    scheme: str
    c: float
    n: int
    max_real_part: float
    max_abs_imag: float
    tolerance: float
    stable: bool
    min_cos_angle: float | None = None
    max_cos_angle: float | None = None
    max_vector_condition: float | None = None


def stability_scan(scheme: str, c: float, grid: BlockGrid) -> StabilityReport:
    """Scan symbol eigenvalues over all resolvable wavenumbers.

    A scheme passes when eigenvalue real parts stay below a round-off
    tolerance of 1e-10 / s^2 (s the sub-spacing) and no spurious imaginary
    parts appear.  The flat perturbed scheme is allowed real parts up to |c|
    on top of that: its alternating term shifts the semi-bound
    (v, Qv) <= |c| ||v||^2, which caps growth at e^{|c| t} independent of
    resolution (the measured excess is only O(c^2 h^2)).

    For two-node blocks the report also carries the eigenvector geometry:
    the range of |<psi_1, psi_2>| / (||psi_1|| ||psi_2||) over omega and the
    worst eigenvector-matrix condition number, which bounds how much
    non-orthogonality can amplify modal content.
    """
    op = build_operator(scheme, grid, c)
    s = grid.sub_spacing
    tolerance = 1e-10 / s ** 2
    allowed_real = tolerance + (abs(c) if scheme == "perturbed" else 0.0)
    max_real = -np.inf
    max_imag = 0.0
    min_cos = None
    max_cos = None
    max_cond = None
    half = grid.n // 2
    if scheme == "perturbed" and c != 0.0:
        for omega in range(-half + 1, half + 1):
            values = np.linalg.eigvalsh(perturbed_pair_symbol(grid, c, omega))
            max_real = max(max_real, float(values.max()))
    else:
        for omega in range(-half, half + 1):
            symbol = numeric_block_symbol(op, omega)
            max_real = max(max_real, float(symbol.eigenvalues.real.max()))
            max_imag = max(max_imag, float(np.abs(symbol.eigenvalues.imag).max()))
            if grid.block_size >= 2:
                cond = float(np.linalg.cond(symbol.eigenvectors))
                max_cond = cond if max_cond is None else max(max_cond, cond)
            cos_angle = symbol.cos_angle()
            if cos_angle is not None:
                min_cos = cos_angle if min_cos is None else min(min_cos, cos_angle)
                max_cos = cos_angle if max_cos is None else max(max_cos, cos_angle)
    stable = (max_real <= allowed_real) and (max_imag <= tolerance)
    return StabilityReport(scheme=scheme, c=c, n=grid.n,
                           max_real_part=float(max_real), max_abs_imag=float(max_imag),
                           tolerance=tolerance, stable=bool(stable),
                           min_cos_angle=min_cos, max_cos_angle=max_cos,
                           max_vector_condition=max_cond)


# ---------------------------------------------------------------------------
# least-squares order fitting and the truncation-order oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrderFit:
    order: float
    residual_rms: float
    n_used: int
    dropped_coarsest: bool


def fit_order(sizes, errors, drop_deviant_coarsest: bool = True,
              error_floor: float | None = None) -> OrderFit:
    """Least-squares order from a (sizes, errors) ladder in log10-log10 space.

    ``order`` is minus the fitted slope.  Points with error below
    ``error_floor`` (round-off saturated) are discarded first.  When at least
    four points remain and the coarsest deviates from the fitted line by more
    than 10% (linear scale), it is dropped and the fit repeated — the same
    rule a reader applies to the pre-asymptotic point of a log-log plot.
    """
    sizes = np.asarray(sizes, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if error_floor is not None:
        keep = errors > error_floor
        sizes, errors = sizes[keep], errors[keep]
    if sizes.size < 2:
        raise ValueError("need at least two usable ladder points to fit an order")
    if np.any(errors <= 0):
        raise ValueError("errors must be positive to fit a log-log slope")
    log_m, log_e = np.log10(sizes), np.log10(errors)

    def fit(lm, le):
        slope, intercept = np.polyfit(lm, le, 1)
        resid = le - (slope * lm + intercept)
        return slope, float(np.sqrt(np.mean(resid ** 2))), resid

    slope, rms, resid = fit(log_m, log_e)
    dropped = False
    if drop_deviant_coarsest and sizes.size >= 4:
        if abs(10.0 ** (-resid[0]) - 1.0) > 0.10:
            slope, rms, _ = fit(log_m[1:], log_e[1:])
            dropped = True
    return OrderFit(order=float(-slope), residual_rms=rms,
                    n_used=int(sizes.size - dropped), dropped_coarsest=dropped)


def _default_profile():
    w = lambda x: np.exp(np.cos(x))
    w_xx = lambda x: (np.sin(x) ** 2 - np.cos(x)) * np.exp(np.cos(x))
    return w, w_xx


@dataclass(frozen=True)
class OrderEstimate:
    """Observed truncation order of a scheme against a smooth profile."""

    scheme: str
    c: float
    observed_order: float
    resolutions: tuple
    residual_norms: tuple


def truncation_order(op: StencilOperator, w=None, w_xx=None, ladder=None) -> OrderEstimate:
    """Truncation order of op's scheme: slope of ||w_xx - Q w|| under refinement.

    Rebuilds the operator on a doubling ladder starting from op's own
    resolution (default four rungs) and measures the discrete residual of the
    exact second derivative.  For the flat perturbed scheme the alternating
    term is part of the residual, which is why its truncation order is 0
    while its solution order is 2.
    """
    if w is None or w_xx is None:
        w, w_xx = _default_profile()
    if ladder is None:
        ladder = tuple(op.grid.n * 2 ** k for k in range(4))
    norms = []
    sizes = []
    for n in ladder:
        grid = make_grid(n, op.grid.block_size)
        refined = build_operator(op.scheme, grid, op.c)
        residual = sample(grid, w_xx) - refined.apply(sample(grid, w))
        norms.append(l2_norm(residual))
        sizes.append(grid.n_points)
    fit = fit_order(sizes, norms)
    return OrderEstimate(scheme=op.scheme, c=op.c, observed_order=fit.order,
                         resolutions=tuple(ladder), residual_norms=tuple(norms))


# ---------------------------------------------------------------------------
# modal evolution prediction (two-point block scheme)
# ---------------------------------------------------------------------------

def modal_evolution_prediction(c: float, omega: int, t: float, grid: BlockGrid) -> np.ndarray:
    """Two-term prediction of the evolved single mode e^{i omega x}.

    The consistent branch decays as e^{q1 t} with
    q1 = -omega^2 + (1+4c) omega^4 / (12-24c) * s^2 + O(s^4), and the
    eigenvector mixes in the aliased wave with coefficient
    -i c / (4-8c) * (omega s)^3, giving

        v(t) ~ e^{-omega^2 t} (1 + (1+4c) omega^4 t / (12-24c) * s^2) e^{i omega x}
             + e^{-omega^2 t} * (-i c / (4-8c)) * (omega s)^3 * e^{i nu x}.

    The aliased term rides the consistent branch, so it is damped by the same
    physical decay factor; it is the highly oscillatory O(h^3) component that
    post-processing filters remove.  Requires |omega|^3 * h <= 1 so the
    truncated expansion is meaningful.
    """
    if grid.block_size != 2:
        raise ValueError("modal prediction applies to two-node block grids only")
    if abs(omega) ** 3 * grid.h > 1.0:
        raise ValueError(f"wavenumber {omega} too high for the expansion at h={grid.h:g}")
    s = grid.sub_spacing
    nu = alias_wavenumber(omega, grid.n)
    decay = np.exp(-omega ** 2 * t)
    curvature = (1 + 4 * c) * omega ** 4 * t / (12 - 24 * c) * s ** 2
    alias_coef = -1j * c / (4 - 8 * c) * (omega * s) ** 3
    return (decay * (1 + curvature) * np.exp(1j * omega * grid.x)
            + decay * alias_coef * np.exp(1j * nu * grid.x))


# ---------------------------------------------------------------------------
# high-frequency error mode of the flat perturbed scheme
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PerturbedModeReport:
    c: float
    n: int
    t: float
    amplitude: float
    bound: float
    passed: bool


def perturbed_error_mode_check(c: float, grid: BlockGrid, t: float = 1.0) -> PerturbedModeReport:
    """Evolve the error equation of the perturbed scheme and bound its high mode.

    The alternating term turns the smooth solution u = e^{-t} cos x into an
    O(1) oscillatory residual c (-1)^j u_j concentrated at the top of the
    resolvable band.  Driving the error equation dE/dt = Q E + c (-1)^j u
    from E = 0, the band-edge amplitude must settle near the equilibrium
    where the O(1/h^2) damping balances the O(1) forcing — two orders below
    the residual, within (2/n)^2 |c| (1 + 1%).
    """
    from .timestep import IntegratorSpec, evolve

    if grid.block_size != 1:
        raise ValueError("the perturbed scheme lives on flat grids")
    op = build_perturbed(grid, c)
    sign = np.where(np.arange(grid.n_points) % 2 == 0, 1.0, -1.0)
    cos_x = np.cos(grid.x)

    def forcing(time):
        return c * sign * np.exp(-time) * cos_x

    result = evolve(op, forcing, np.zeros(grid.n_points), t, IntegratorSpec(method="euler"))
    spectrum = np.fft.fft(result.final_state) / grid.n_points
    freqs = np.fft.fftfreq(grid.n_points, d=1.0 / grid.n_points)
    band = np.abs(freqs) > grid.n / 4
    amplitude = 2.0 * float(np.abs(spectrum[band]).max())
    bound = (2.0 / grid.n) ** 2 * abs(c) * 1.01
    return PerturbedModeReport(c=c, n=grid.n, t=t, amplitude=amplitude,
                               bound=bound, passed=bool(amplitude <= bound))
