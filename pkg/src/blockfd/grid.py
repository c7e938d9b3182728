"""Block-structured periodic grids on [0, 2*pi) and discrete norms.

A block grid divides the periodic interval into ``n_blocks`` equal blocks of
``block_size`` sub-nodes each, so every node sits at a multiple of the uniform
sub-spacing ``h / block_size``.  Grid functions are plain numpy arrays of
length ``n_points`` in block-major node order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi

#: Grid functions are bare numpy arrays (real or complex) of length grid.n_points.
GridFunction = np.ndarray


@dataclass(frozen=True, eq=False)
class BlockGrid:
    """Immutable periodic grid of ``n_blocks`` blocks of ``block_size`` sub-nodes.

    Attributes
    ----------
    n : int
        Resolution parameter used in convergence ladders.  Flat grids
        (block_size=1) have ``n`` blocks; multi-node block grids have ``n+1``
        blocks.  ``n`` must be even so the flat grid supports the alternating
        (-1)^j node pattern and every integer wavenumber |omega| <= n/2 has a
        well-defined aliasing partner on the block grid.
    block_size : int
        Sub-nodes per block, in {1, 2, 3}.
    n_blocks : int
        Number of blocks; the block spacing is ``h = 2*pi / n_blocks``.
    """

    n: int
    block_size: int
    n_blocks: int
    h: float
    sub_spacing: float
    n_points: int
    domain_length: float = field(default=TWO_PI)
    x: np.ndarray = field(default=None, repr=False)


def make_grid(n: int, block_size: int) -> BlockGrid:
    """Build a periodic block grid for resolution parameter ``n``.

    Parameters
    ----------
    n : int
        Even resolution parameter, at least 4.
    block_size : int
        Sub-nodes per block; 1 gives a flat grid with ``n`` points, 2 or 3
        give block grids with ``(n+1) * block_size`` points.
    """
    if block_size not in (1, 2, 3):
        raise ValueError(f"block_size must be 1, 2 or 3, got {block_size}")
    if n % 2 != 0 or n < 4:
        raise ValueError(f"resolution parameter must be even and >= 4, got {n}")
    n_blocks = n if block_size == 1 else n + 1
    h = TWO_PI / n_blocks
    sub_spacing = h / block_size
    n_points = n_blocks * block_size
    x = np.arange(n_points) * sub_spacing
    return BlockGrid(n=n, block_size=block_size, n_blocks=n_blocks, h=h,
                     sub_spacing=sub_spacing, n_points=n_points, x=x)


def sample(grid: BlockGrid, f) -> GridFunction:
    """Sample a function of x on the grid nodes in block-major order."""
    values = np.asarray(f(grid.x))
    if values.ndim == 0:
        values = np.full(grid.n_points, complex(values) if np.iscomplexobj(values) else float(values))
    if values.shape != (grid.n_points,):
        raise ValueError(f"sampled values have shape {values.shape}, expected ({grid.n_points},)")
    return values


def l2_norm(v: GridFunction) -> float:
    """Grid-weighted discrete L2 norm, sqrt((2*pi/M) * sum |v_i|^2).

    The 2*pi/M weight makes norms of sampled functions resolution-independent,
    so error norms from different grids are directly comparable.
    """
    v = np.asarray(v)
    return float(np.sqrt(TWO_PI / v.size * np.sum(np.abs(v) ** 2)))
