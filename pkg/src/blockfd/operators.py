"""Periodic banded stencil operators approximating d^2/dx^2 on block grids.

Each operator stores one stencil row per block position; offsets are in
sub-spacing units relative to the row's own node.  The two- and three-point
block schemes carry a free parameter c that deforms the stencil without
changing the approximated operator; particular c values cancel the leading
term of the symbol error and raise the observed solution order (see the
analysis module).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple

import numpy as np

from .grid import BlockGrid, GridFunction


@dataclass(frozen=True, eq=False)
class StencilOperator:
    """Periodic banded operator with one stencil row per block position.

    ``rows[k]`` maps offset d (in sub-spacing units, relative to block
    position k) to the folded coefficient; the full entry is
    ``rows[k][d] * scale``.  ``alternating_amplitude`` adds c * (-1)^i * v_i,
    the position-dependent zeroth-order perturbation of the flat scheme.
    """

    scheme: str
    grid: BlockGrid
    c: float
    rows: tuple
    scale: float
    alternating_amplitude: float = 0.0
    _offsets: tuple = field(init=False, repr=False)
    _coef_vectors: tuple = field(init=False, repr=False)
    _alt_sign: np.ndarray = field(init=False, repr=False, default=None)

    def __post_init__(self):
        m, n_points = self.grid.block_size, self.grid.n_points
        offsets = sorted({d for row in self.rows for d in row})
        vectors = []
        for d in offsets:
            column = np.array([self.rows[k].get(d, 0.0) * self.scale for k in range(m)])
            vectors.append(np.tile(column, n_points // m))
        object.__setattr__(self, "_offsets", tuple(offsets))
        object.__setattr__(self, "_coef_vectors", tuple(vectors))
        if self.alternating_amplitude != 0.0:
            sign = np.where(np.arange(n_points) % 2 == 0, 1.0, -1.0)
            object.__setattr__(self, "_alt_sign", sign)

    def apply(self, v: GridFunction) -> GridFunction:
        """Matrix-free periodic application, O(n_points * stencil width)."""
        v = np.asarray(v)
        if v.shape != (self.grid.n_points,):
            raise ValueError(f"input has shape {v.shape}, expected ({self.grid.n_points},)")
        out = self._coef_vectors[0] * np.roll(v, -self._offsets[0])
        for d, coef in zip(self._offsets[1:], self._coef_vectors[1:]):
            out = out + coef * np.roll(v, -d)
        if self._alt_sign is not None:
            out = out + self.alternating_amplitude * self._alt_sign * v
        return out

    def dense_matrix(self) -> np.ndarray:
        """Assemble the full n_points x n_points matrix (test oracle)."""
        m, n_points = self.grid.block_size, self.grid.n_points
        a = np.zeros((n_points, n_points))
        for i in range(n_points):
            for d, coef in self.rows[i % m].items():
                a[i, (i + d) % n_points] += coef * self.scale
        if self._alt_sign is not None:
            a[np.diag_indices(n_points)] += self.alternating_amplitude * self._alt_sign
        return a

    def fourier_symbol(self, omega: int) -> np.ndarray:
        """m x m block Fourier symbol S(omega) of the stencil part.

        Applying the operator to the block wave with node phases
        e^{i omega x} acts on the vector of m block amplitudes as S(omega).
        The alternating term of the flat perturbed scheme couples wavenumber
        pairs and is not representable here; see analysis.perturbed_pair_symbol.
        """
        m, s = self.grid.block_size, self.grid.sub_spacing
        symbol = np.zeros((m, m), dtype=complex)
        for k in range(m):
            for d, coef in self.rows[k].items():
                symbol[k, (k + d) % m] += coef * self.scale * np.exp(1j * omega * d * s)
        return symbol

    def stencil_table(self) -> str:
        """Human-readable dump of the stencil rows (offset -> coefficient)."""
        lines = [f"{self.scheme} (c={self.c:g}, scale={self.scale:.6g})"]
        for k, row in enumerate(self.rows):
            entries = ", ".join(f"{d:+d}: {coef:+.6g}" for d, coef in sorted(row.items()))
            lines.append(f"  row {k}: {entries}")
        if self.alternating_amplitude != 0.0:
            lines.append(f"  alternating identity term: {self.alternating_amplitude:+.6g} * (-1)^i")
        return "\n".join(lines)


def _require_block_size(grid: BlockGrid, m: int, scheme: str):
    if grid.block_size != m:
        raise ValueError(f"{scheme} requires block_size={m}, got {grid.block_size}")


def build_perturbed(grid: BlockGrid, c: float) -> StencilOperator:
    """Flat 3-point second difference plus the alternating term c * (-1)^j * v_j.

    The alternating term injects an O(1) residual against d^2/dx^2, yet the
    scheme stays second-order convergent: the residual lives at the highest
    resolvable wavenumbers, where the difference operator damps it by a factor
    O(h^2).
    """
    _require_block_size(grid, 1, "perturbed")
    rows = ({-1: 1.0, 0: -2.0, 1: 1.0},)
    return StencilOperator(scheme="perturbed", grid=grid, c=c, rows=rows,
                           scale=1.0 / grid.h ** 2, alternating_amplitude=c)


def build_block2(grid: BlockGrid, c: float) -> StencilOperator:
    """Two-point block scheme; c deforms both rows by a cubic-difference pattern.

    Truncation is only O(h) for c != 0, but the scheme is second order in the
    solution, and third order at c = -1/4 where the leading symbol error
    cancels.
    """
    _require_block_size(grid, 2, "block2")
    rows = (
        {-1: 1 - c, 0: -2 + 3 * c, 1: 1 - 3 * c, 2: c},
        {-2: c, -1: 1 - 3 * c, 0: -2 + 3 * c, 1: 1 - c},
    )
    return StencilOperator(scheme="block2", grid=grid, c=c, rows=rows,
                           scale=1.0 / grid.sub_spacing ** 2)


def build_block3_low(grid: BlockGrid, c: float) -> StencilOperator:
    """Three-point block scheme, second order; third order at c = 1.340.

    The outer rows add a cubic-difference c-pattern oriented so that positive
    c near 4/3 cancels the leading symbol error term (the opposite orientation
    would put the cancellation at c = -4/3 and leave c = 1.340 second order;
    see analysis.q1_curvature ladder checks).
    """
    _require_block_size(grid, 3, "block3-low")
    rows = (
        {-1: 4 + c, 0: -8 - 3 * c, 1: 4 + 3 * c, 2: -c},
        {-1: 4.0, 0: -8.0, 1: 4.0},
        {-2: -c, -1: 4 + 3 * c, 0: -8 - 3 * c, 1: 4 + c},
    )
    return StencilOperator(scheme="block3-low", grid=grid, c=c, rows=rows,
                           scale=1.0 / (4 * grid.sub_spacing ** 2))


def build_block3_high(grid: BlockGrid, c: float) -> StencilOperator:
    """Three-point block scheme, fourth order; fifth order at c = -0.385.

    Outer rows are the symmetric 5-point stencil plus a quintic-difference
    c-pattern (mirrored between the two outer rows); the middle row is the
    plain 5-point stencil.  At c = 1 the outermost coefficients vanish and the
    stencil reaches only one point outside the block per side.
    """
    _require_block_size(grid, 3, "block3-high")
    rows = (
        {-2: -1 + c, -1: 16 - 5 * c, 0: -30 + 10 * c, 1: 16 - 10 * c, 2: -1 + 5 * c, 3: -c},
        {-2: -1.0, -1: 16.0, 0: -30.0, 1: 16.0, 2: -1.0},
        {-3: -c, -2: -1 + 5 * c, -1: 16 - 10 * c, 0: -30 + 10 * c, 1: 16 - 5 * c, 2: -1 + c},
    )
    return StencilOperator(scheme="block3-high", grid=grid, c=c, rows=rows,
                           scale=1.0 / (12 * grid.sub_spacing ** 2))


_STANDARD_ROWS = {
    2: ({-1: 1.0, 0: -2.0, 1: 1.0}, Fraction(1, 1)),
    4: ({-2: -1.0, -1: 16.0, 0: -30.0, 1: 16.0, 2: -1.0}, Fraction(1, 12)),
    6: ({-3: 2.0, -2: -27.0, -1: 270.0, 0: -490.0, 1: 270.0, 2: -27.0, 3: 2.0}, Fraction(1, 180)),
}


def build_standard(grid: BlockGrid, order: int) -> StencilOperator:
    """Classical central second-difference stencil of the given order (2, 4, 6)."""
    _require_block_size(grid, 1, f"std{order}")
    if order not in _STANDARD_ROWS:
        raise ValueError(f"unsupported standard order {order}; choose 2, 4 or 6")
    row, prefactor = _STANDARD_ROWS[order]
    width = max(abs(d) for d in row)
    if grid.n_points < 2 * width + 1:
        raise ValueError(f"grid too small for the {2 * width + 1}-point stencil")
    return StencilOperator(scheme=f"std{order}", grid=grid, c=0.0, rows=(dict(row),),
                           scale=float(prefactor) / grid.h ** 2)


class SchemeDef(NamedTuple):
    block_size: int
    build: Callable[[BlockGrid, float], StencilOperator]


#: Registry of scheme builders keyed by CLI name; builders take (grid, c).
#: The standard schemes ignore c.
SCHEMES = {
    "perturbed": SchemeDef(1, build_perturbed),
    "block2": SchemeDef(2, build_block2),
    "block3-low": SchemeDef(3, build_block3_low),
    "block3-high": SchemeDef(3, build_block3_high),
    "std2": SchemeDef(1, lambda grid, c: build_standard(grid, 2)),
    "std4": SchemeDef(1, lambda grid, c: build_standard(grid, 4)),
    "std6": SchemeDef(1, lambda grid, c: build_standard(grid, 6)),
}


def build_operator(scheme: str, grid: BlockGrid, c: float = 0.0) -> StencilOperator:
    """Build a registered scheme by name on the given grid."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {sorted(SCHEMES)}")
    return SCHEMES[scheme].build(grid, c)


class StencilCost(NamedTuple):
    adds: Fraction
    mults: Fraction
    points_per_side: int


def stencil_cost(op: StencilOperator) -> StencilCost:
    """Operation counts per point and stencil reach outside the block.

    Multiplications count the nonzero folded coefficients per row, additions
    one fewer, both averaged over the block rows as exact rationals.  The
    reach is the largest number of touched node positions strictly outside
    the operator's own block, per side, over all rows.
    """
    m = op.grid.block_size
    nonzero_counts = []
    left_reach = right_reach = 0
    for k, row in enumerate(op.rows):
        nonzero = [d for d, coef in row.items() if coef != 0.0]
        count = len(nonzero)
        if op.alternating_amplitude != 0.0:
            count += 1
        nonzero_counts.append(count)
        left_reach = max(left_reach, sum(1 for d in nonzero if k + d < 0))
        right_reach = max(right_reach, sum(1 for d in nonzero if k + d > m - 1))
    total = sum(nonzero_counts)
    return StencilCost(adds=Fraction(total - m, m), mults=Fraction(total, m),
                       points_per_side=max(left_reach, right_reach))
