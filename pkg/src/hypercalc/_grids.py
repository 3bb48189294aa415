"""Grid construction, composite quadrature and finite-difference helpers."""

from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss

MAX_GRID_POINTS = 512


def loglinear_grid(x_max: float, n: int = 257) -> np.ndarray:
    """Hybrid grid on [0, x_max]: uniform up to 1, geometric beyond.

    Resolves both the origin (where kernels have power-type behaviour) and
    exponential tails without exceeding ``MAX_GRID_POINTS`` nodes.
    """
    if x_max <= 0:
        raise ValueError("x_max must be positive")
    n = int(min(n, MAX_GRID_POINTS))
    if x_max <= 1.0:
        return np.linspace(0.0, x_max, n)
    # split nodes between the linear and geometric parts in proportion to
    # length and decades, with at least a third in each part
    n_lin = max(n // 3, min(2 * n // 3, int(n / (1.0 + np.log2(x_max)))))
    n_geo = n - n_lin
    lin = np.linspace(0.0, 1.0, n_lin + 1)
    geo = np.geomspace(1.0, x_max, n_geo + 1)
    return np.concatenate([lin[:-1], geo])


def cell_rule(grid: np.ndarray, q: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights over the cells of ``grid``.

    Returns flat arrays of ``(len(grid)-1) * q`` nodes and weights whose
    weighted sums integrate over ``[grid[0], grid[-1]]``.
    """
    x, w = leggauss(q)
    lo = grid[:-1]
    h = np.diff(grid)
    nodes = (lo[:, None] + 0.5 * h[:, None] * (x[None, :] + 1.0)).ravel()
    weights = (0.5 * h[:, None] * w[None, :]).ravel()
    return nodes, weights


def fd_weights(x0: float, xs: np.ndarray, m: int) -> np.ndarray:
    """Finite-difference weights for the m-th derivative at ``x0`` on nodes ``xs``.

    Fornberg's recursion (Math. Comp. 51 (1988), 699-706); exact for
    polynomials of degree ``len(xs) - 1``.  Returns shape ``(m+1, len(xs))``
    with row ``k`` the weights of the k-th derivative.
    """
    n = len(xs)
    if m >= n:
        raise ValueError("need more nodes than the derivative order")
    c = np.zeros((m + 1, n))
    c1 = 1.0
    c4 = xs[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = xs[i] - x0
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[k, i] = c1 * (k * c[k - 1, i - 1] - c5 * c[k, i - 1]) / c2
                c[0, i] = -c1 * c5 * c[0, i - 1] / c2
            for k in range(mn, 0, -1):
                c[k, j] = (c4 * c[k, j] - k * c[k - 1, j]) / c3
            c[0, j] = c4 * c[0, j] / c3
        c1 = c2
    return c


def derivative_matrix(grid: np.ndarray, order: int, stencil: int = 5,
                      reflect_even: bool = False) -> np.ndarray:
    """Dense differentiation matrix for d^order/dx^order on a 1-d grid.

    Uses ``stencil``-point Fornberg weights (4th-order for the default
    5-point stencil on smooth data).  With ``reflect_even`` the grid is
    virtually extended across x = grid[0] by even reflection, which is the
    right boundary treatment for functions with a vanishing odd part there.
    """
    n = len(grid)
    half = stencil // 2
    if reflect_even:
        ext = np.concatenate([2 * grid[0] - grid[half:0:-1], grid])
        idx_map = np.concatenate([np.arange(half, 0, -1), np.arange(n)])
    else:
        ext = grid
        idx_map = np.arange(n)
    mat = np.zeros((n, n))
    for i in range(n):
        i_ext = i + (half if reflect_even else 0)
        lo = min(max(i_ext - half, 0), len(ext) - stencil)
        sel = np.arange(lo, lo + stencil)
        w = fd_weights(float(ext[i_ext]), ext[sel], order)[order]
        for s, wt in zip(idx_map[sel], w):
            mat[i, s] += wt
    return mat
