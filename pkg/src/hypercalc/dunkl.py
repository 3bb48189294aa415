r"""Signed-line calculus: rank-one Dunkl transform, translation, convolution.

Functions live on :math:`\mathbb{R}` with the measure
:math:`d\mu^D_\nu(x) = \tfrac12 |x|^{\nu-1} dx`.  The kernel

.. math:: j^{\nu,D}(x) = j^\nu(x) + i\,\frac{x}{\nu}\, j^{\nu+2}(x)

replaces the complex exponential (and equals :math:`e^{ix}` at nu = 1); the
transform integrates against its conjugate.  The first-order operator

.. math:: D_\nu f(x) = f'(x) + \frac{\nu-1}{2}\,\frac{f(x)-f(-x)}{x}

is intertwined with multiplication by :math:`i\xi`, and the translation mixes
the even and odd parts through the chord length
:math:`\langle x,y\rangle_\omega = \sqrt{x^2+y^2-2\omega xy}`:

.. math:: \tau^{[x]} f(y) = \int_{-1}^1 \Big[f_e(z) + \frac{x+y}{z} f_o(z)\Big]
          (1-\omega)\, d\pi_\nu(\omega), \qquad z = \langle x,y\rangle_\omega .

Convolution is :math:`(f \ast g)(x) = \int \tau^{[x]} f(-y)\, g(y)\, d\mu^D_\nu(y)`;
for even inputs it coincides with the half-line convolution.
"""

from __future__ import annotations

import dataclasses
from typing import Callable, Optional

import numpy as np

from ._grids import derivative_matrix, loglinear_grid
from .hankel import measure_rule
from .specfun import angular_rule, eval_dunkl_kernel

__all__ = [
    "LineFunction",
    "dunkl_transform",
    "dunkl_derivative",
    "dunkl_translate",
    "dunkl_convolve",
    "dunkl_plane_slice",
    "dunkl_plane_transform",
    "dunkl_diamond",
]

ODD_RATIO_CUTOFF = 1e-6


def symmetric_grid(x_max: float, n: int = 257) -> np.ndarray:
    """Grid on [-x_max, x_max], symmetric about (and containing) 0."""
    half = loglinear_grid(x_max, n)
    return np.concatenate([-half[:0:-1], half])


@dataclasses.dataclass
class LineFunction:
    """Function on the line, sampled on a symmetric grid with optional closed form."""

    grid: np.ndarray
    values: np.ndarray
    interpolation: str = "cubic"
    closed_form: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self) -> None:
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values)
        if self.grid.ndim != 1 or self.grid.size < 3:
            raise ValueError("grid must be 1-d with at least three nodes")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if np.max(np.abs(self.grid + self.grid[::-1])) > 1e-12 * max(1.0, -self.grid[0]):
            raise ValueError("grid must be symmetric about 0")
        if self.values.shape != self.grid.shape:
            raise ValueError("values must match grid shape")
        self._spline = None

    @property
    def x_max(self) -> float:
        return float(self.grid[-1])

    @classmethod
    def from_closed_form(cls, fn, x_max: float, n: int = 257,
                         interpolation: str = "cubic") -> "LineFunction":
        grid = symmetric_grid(x_max, n)
        return cls(grid, np.asarray(fn(grid)), interpolation, closed_form=fn)

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        if self.closed_form is not None:
            out = np.asarray(self.closed_form(x_arr))
        else:
            if self._spline is None:
                from scipy.interpolate import CubicSpline

                self._spline = CubicSpline(self.grid, self.values)
            out = self._spline(np.clip(x_arr, -self.x_max, self.x_max))
            out = np.where(np.abs(x_arr) > self.x_max, 0.0, out)
        if np.isscalar(x) or np.ndim(x) == 0:
            return out[()]
        return out

    def reflect(self) -> "LineFunction":
        """The reflected function x -> f(-x)."""
        closed = None
        if self.closed_form is not None:
            fn = self.closed_form
            closed = lambda x: np.asarray(fn(-np.asarray(x)))
        return LineFunction(self.grid, self.values[::-1].copy(), self.interpolation, closed)


def _half_rule(nu: float, f: LineFunction, q: int) -> tuple[np.ndarray, np.ndarray]:
    # positive-half measure nodes/weights for the symmetric grid of f;
    # with the 1/2 normalisation, summing f(y) + f(-y) over them gives the
    # full-line integral against |x|^{nu-1} dx / 2
    pos = f.grid[f.grid >= 0.0]
    y, w = measure_rule(nu, pos, q)
    return y, 0.5 * w


def line_integral(nu: float, f: LineFunction, q: int = 8):
    """``int_R f dmu^D_nu`` over the support of the grid."""
    y, w = _half_rule(nu, f, q)
    total = np.sum(w * (np.asarray(f(y)) + np.asarray(f(-y))))
    return complex(total) if np.iscomplexobj(f.values) else float(total)


def dunkl_transform(nu: float, f: LineFunction, xi, q: int = 8):
    """Transform values ``int f(x) conj(j^{nu,D}(x xi)) dmu^D_nu(x)``.

    Returns a complex array matching the shape of xi (scalar in, scalar out).
    """
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    y, w = _half_rule(nu, f, q)
    fp = np.asarray(f(y))
    fm = np.asarray(f(-y))
    # conj(j^D(z)) = j^D(-z)
    kp = eval_dunkl_kernel(nu, -xi_arr[:, None] * y[None, :])
    vals = kp @ (w * fp) + np.conj(kp) @ (w * fm)
    if np.ndim(xi) == 0:
        return vals[0]
    return vals


def _odd_ratio(f: LineFunction, z: np.ndarray) -> np.ndarray:
    """(f(z) - f(-z)) / (2 z), continued through z = 0 by the odd derivative."""
    z = np.asarray(z)
    safe = np.where(np.abs(z) < ODD_RATIO_CUTOFF, 1.0, z)
    ratio = (np.asarray(f(safe)) - np.asarray(f(-safe))) / (2.0 * safe)
    if np.any(np.abs(z) < ODD_RATIO_CUTOFF):
        h = 1e-4 * max(1.0, f.x_max / 10.0)
        d_odd = (8.0 * (np.asarray(f(h)) - np.asarray(f(-h)))
                 - (np.asarray(f(2 * h)) - np.asarray(f(-2 * h)))) / (24.0 * h)
        ratio = np.where(np.abs(z) < ODD_RATIO_CUTOFF, d_odd, ratio)
    return ratio


def dunkl_derivative(nu: float, f: LineFunction, h: float = 5e-3) -> LineFunction:
    """Apply ``D_nu f = f' + (nu-1)/2 * (f(x) - f(-x))/x`` on the grid of f.

    When f carries a closed form, the 4th-order stencil is wrapped into a
    closed-form evaluator of the result, so downstream quadrature does not
    pay interpolation error.
    """
    grid = f.grid
    if f.closed_form is not None:
        offs = np.array([-2.0, -1.0, 1.0, 2.0])
        c1 = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0

        def ev(x_arr):
            x_arr = np.asarray(x_arr, dtype=float)
            fp = np.asarray(f(x_arr[..., None] + h * offs))
            d1 = (fp @ c1) / h
            return d1 + (nu - 1.0) * _odd_ratio(f, x_arr)

        return LineFunction(grid, ev(grid), f.interpolation, closed_form=ev)
    d1 = derivative_matrix(grid, 1) @ f.values
    vals = d1 + (nu - 1.0) * _odd_ratio(f, grid)
    return LineFunction(grid, vals, f.interpolation)


def _chord_signed(x, y, omega):
    # sqrt(x^2 + y^2 - 2 omega x y) arranged to avoid cancellation for
    # either sign of the product x y
    xy = x * y
    same = np.where(xy >= 0.0,
                    (x - y) ** 2 + 2.0 * xy * (1.0 - omega),
                    (x + y) ** 2 - 2.0 * xy * (1.0 + omega))
    return np.sqrt(np.maximum(same, 0.0))


def _translate_kernel(nu: float, f: LineFunction, x, y, nodes, weights):
    """Common core of translate/convolve: tau^[x] f(y) with broadcasting."""
    z = _chord_signed(np.asarray(x)[..., None], np.asarray(y)[..., None], nodes)
    f_even = 0.5 * (np.asarray(f(z)) + np.asarray(f(-z)))
    ratio = _odd_ratio(f, z)
    s = np.asarray(x)[..., None] + np.asarray(y)[..., None]
    return (f_even + s * ratio) @ weights


def dunkl_translate(nu: float, f: LineFunction, x: float,
                    n_omega: int = 32) -> LineFunction:
    """Signed translation ``tau^[x] f`` on the grid of f.

    The even part of f moves through the chord average; the odd part picks
    up the factor (x+y)/z.  At nu = 1 this reduces to f(x + y) exactly.
    """
    rule = angular_rule(nu, n_omega)
    x = float(x)
    w = rule.weights * (1.0 - rule.nodes)

    def ev(y_arr):
        return _translate_kernel(nu, f, x, np.asarray(y_arr, dtype=float), rule.nodes, w)

    return LineFunction(f.grid, ev(f.grid), f.interpolation, closed_form=ev)


def dunkl_convolve(nu: float, f: LineFunction, g: LineFunction,
                   q: int = 8, n_omega: int = 32, chunk: int = 32) -> LineFunction:
    """Convolution ``(f * g)(x) = int tau^[x] f(-y) g(y) dmu^D_nu(y)``.

    The result carries an evaluator on the combined support
    ``f.x_max + g.x_max``.
    """
    rule = angular_rule(nu, n_omega)
    w_omega = rule.weights * (1.0 - rule.nodes)
    y, wy = _half_rule(nu, g, q)
    y_full = np.concatenate([y, -y])
    gw = np.concatenate([wy * np.asarray(g(y)), wy * np.asarray(g(-y))])

    def ev(x_arr):
        x_flat = np.atleast_1d(np.asarray(x_arr, dtype=float)).ravel()
        out = np.empty(x_flat.shape, dtype=np.result_type(f.values, gw))
        for i in range(0, x_flat.size, chunk):
            xs = x_flat[i:i + chunk]
            tau = _translate_kernel(nu, f, xs[:, None], -y_full[None, :],
                                    rule.nodes, w_omega)
            out[i:i + chunk] = tau @ gw
        return out.reshape(np.shape(x_arr))

    support = f.x_max + g.x_max
    grid = f.grid if f.x_max >= support * 0.999 else symmetric_grid(
        support, (len(f.grid) + 1) // 2)
    return LineFunction(grid, ev(grid), f.interpolation, closed_form=ev)


# ---------------------------------------------------------------------------
# signed-plane extension: functions on R x R with the product of the signed
# measure and du, convolved by combining the signed convolution in x with a
# shift in u (mirroring the half-plane group convolution)

def dunkl_plane_slice(f, v: float, interpolation: str = "cubic") -> LineFunction:
    """The x-section ``f(., v)`` of a signed-plane function as a LineFunction.

    ``f`` is a plane function whose x-grid is symmetric about 0.
    """
    if f.closed_form is not None:
        fn = f.closed_form
        closed = lambda x_arr: np.asarray(fn(np.asarray(x_arr, dtype=float), v))
        return LineFunction(f.x_grid, closed(f.x_grid), interpolation, closed)
    vals = np.asarray(f(f.x_grid, np.full_like(f.x_grid, v)))
    return LineFunction(f.x_grid, vals, interpolation)


def dunkl_plane_transform(nu: float, f, xi, v: float, q: int = 8):
    """Partial signed transform of the v-slice of a signed-plane function."""
    return dunkl_transform(nu, dunkl_plane_slice(f, v), xi, q=q)


def dunkl_diamond(nu: float, f, g, q: int = 6, n_omega: int = 24,
                  qv: int = 6, v_panels: Optional[int] = None, out_grids=None):
    """Signed-plane group convolution
    ``(f <> g)(x,u) = int (f^v *D g^{u-v}_{(e^v)})(x) dv``.

    Both factors are plane functions on symmetric x-grids; the inner signed
    convolution follows the translate-and-integrate form, the outer integral
    runs Gauss-Legendre panels over f's u-range.  For even (in x) inputs
    this coincides with the half-plane convolution.  Direct evaluation only:
    intended for moderate grids.
    """
    from .gnu_space import PlaneFunction, _v_rule

    if out_grids is None:
        x_out, u_out = f.x_grid, f.u_grid
    else:
        x_out, u_out = (np.asarray(out_grids[0], dtype=float),
                        np.asarray(out_grids[1], dtype=float))
    rule = angular_rule(nu, n_omega)
    w_omega = rule.weights * (1.0 - rule.nodes)
    v_nodes, v_w = _v_rule(f.u_grid, qv, v_panels)

    # full-line quadrature nodes for the y-integral, built on f's positive grid
    pos = f.x_grid[f.x_grid >= 0.0]
    y_half, w_half = measure_rule(nu, pos, q)
    y_full = np.concatenate([y_half, -y_half])
    w_full = np.concatenate([0.5 * w_half, 0.5 * w_half])

    out = np.zeros((u_out.size, x_out.size),
                   dtype=np.result_type(f.values, g.values))
    for v, wv in zip(v_nodes, v_w):
        if f.closed_form is not None:
            fn = f.closed_form
            fv = LineFunction(f.x_grid, np.asarray(fn(f.x_grid, v)),
                              closed_form=lambda t, _v=v: np.asarray(fn(np.asarray(t, dtype=float), _v)))
        else:
            fv = dunkl_plane_slice(f, v)
        # tau^[x] f^v(-y) for all output x and quadrature y
        T = _translate_kernel(nu, fv, x_out[:, None], -y_full[None, :],
                              rule.nodes, w_omega)
        # dilated slice of g at level u - v: e^{-nu v} g(e^{-v} y, u-v)
        amp = wv * np.exp(-nu * v)
        G = np.asarray(g(np.exp(-v) * y_full[None, :], (u_out - v)[:, None]))
        out += amp * np.einsum("xy,y,uy->ux", T, w_full, G)
    return PlaneFunction(x_out, u_out, out)
