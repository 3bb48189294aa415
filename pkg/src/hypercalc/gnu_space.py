r"""Calculus on the half-plane group: the half-line extended by dilations.

Points are pairs :math:`(x,u)` with :math:`x \ge 0` acting through
:math:`(x,u)\cdot(y,v) = (\text{generalized translate},\, u+v)`; right Haar
measure is :math:`d\tilde\mu_\nu = x^{\nu-1}\,dx\,du`, the modular weight is
:math:`m_\nu(x,u) = e^{-\nu u}`, inversion is :math:`(x,u)^- = (e^{-u}x, -u)`.
The metric is

.. math:: \rho((x,u),(x',u')) = \operatorname{arccosh}\Big(\cosh(u-u')
          + \frac{|x-x'|^2}{2e^{u+u'}}\Big),

with vector fields :math:`Y_0 = \partial_u`, :math:`Y_1 = e^u\partial_x`.
Group convolution combines a half-line convolution in x with a shift in u:

.. math:: (f \diamond g)(x,u) = \int_{\mathbb{R}}
          \big(f^v \ast_\nu g^{u-v}_{(e^v)}\big)(x)\, dv,

where :math:`f^v = f(\cdot,v)` and the subscript is the L^1-isometric
dilation.  On the transform side this becomes the twisted product

.. math:: (\mathcal{H}\otimes\mathrm{id})(f \diamond g)(\xi,u)
          = \int (\mathcal{H}\otimes\mathrm{id})f(\xi,v)\,
                 (\mathcal{H}\otimes\mathrm{id})g(e^v\xi,u-v)\, dv .
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable, Optional

import numpy as np

from ._grids import cell_rule, derivative_matrix, loglinear_grid
from .hankel import RadialFunction, measure_rule
from .specfun import angular_rule

__all__ = [
    "PlaneFunction",
    "modular_weight",
    "involution",
    "star",
    "distance",
    "group_norm",
    "haar_integral",
    "slice_function",
    "plane_transform",
    "right_translate",
    "diamond",
    "gradient",
    "ball_box",
    "integral_kernel",
    "weighted_radial_integral",
    "radial_comparison_integral",
]


def modular_weight(nu: float, u):
    """Modular weight ``m_nu(x,u) = exp(-nu u)`` (independent of x)."""
    return np.exp(-nu * np.asarray(u, dtype=float))


def involution(x, u):
    """Group inverse ``(x,u)^- = (e^{-u} x, -u)``."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    return np.exp(-u) * x, -u


def _acosh_arg(x, u, xp, up):
    # cosh(u-u') + |x-x'|^2 / (2 e^{u+u'}), clamped to [1, inf) against roundoff
    arg = np.cosh(u - up) + (x - xp) ** 2 * np.exp(-(u + up)) / 2.0
    return np.maximum(arg, 1.0)


def distance(p, q):
    """Metric distance between plane points p = (x,u), q = (x',u')."""
    x, u = np.asarray(p[0], dtype=float), np.asarray(p[1], dtype=float)
    xp, up = np.asarray(q[0], dtype=float), np.asarray(q[1], dtype=float)
    return np.arccosh(_acosh_arg(x, u, xp, up))


def group_norm(x, u):
    """Distance to the identity: ``arccosh(cosh u + e^{-u} x^2 / 2)``."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    return np.arccosh(np.maximum(np.cosh(u) + np.exp(-u) * x ** 2 / 2.0, 1.0))


@dataclasses.dataclass
class PlaneFunction:
    """Function on the plane, sampled on a tensor grid with optional closed form.

    ``values[iu, ix]`` holds the sample at ``(x_grid[ix], u_grid[iu])`` —
    row-major in u then x, matching the on-disk layout.  Outside the grid
    box the function is extended by zero (unless a closed form is present,
    which is then authoritative everywhere).
    """

    x_grid: np.ndarray
    u_grid: np.ndarray
    values: np.ndarray
    closed_form: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None

    def __post_init__(self) -> None:
        self.x_grid = np.asarray(self.x_grid, dtype=float)
        self.u_grid = np.asarray(self.u_grid, dtype=float)
        self.values = np.asarray(self.values)
        if self.x_grid.ndim != 1 or self.u_grid.ndim != 1:
            raise ValueError("grids must be 1-d")
        if np.any(np.diff(self.x_grid) <= 0) or np.any(np.diff(self.u_grid) <= 0):
            raise ValueError("grids must be strictly increasing")
        if self.values.shape != (self.u_grid.size, self.x_grid.size):
            raise ValueError("values must have shape (len(u_grid), len(x_grid))")
        self._spline = None

    @property
    def x_max(self) -> float:
        return float(self.x_grid[-1])

    @classmethod
    def from_closed_form(cls, fn, x_max: float, u_range: tuple[float, float],
                         nx: int = 129, nu_pts: int = 97) -> "PlaneFunction":
        x_grid = loglinear_grid(x_max, nx)
        u_grid = np.linspace(u_range[0], u_range[1], nu_pts)
        vals = np.asarray(fn(x_grid[None, :], u_grid[:, None]))
        return cls(x_grid, u_grid, vals, closed_form=fn)

    def __call__(self, x, u):
        x_arr = np.asarray(x, dtype=float)
        u_arr = np.asarray(u, dtype=float)
        if self.closed_form is not None:
            out = np.asarray(self.closed_form(x_arr, u_arr))
            return out
        if self._spline is None:
            from scipy.interpolate import RectBivariateSpline

            kx = min(3, self.u_grid.size - 1)
            ky = min(3, self.x_grid.size - 1)
            self._spline = RectBivariateSpline(self.u_grid, self.x_grid,
                                               self.values, kx=kx, ky=ky)
        xb, ub = np.broadcast_arrays(x_arr, u_arr)
        inside = ((xb >= self.x_grid[0]) & (xb <= self.x_grid[-1])
                  & (ub >= self.u_grid[0]) & (ub <= self.u_grid[-1]))
        out = self._spline.ev(ub.ravel(), xb.ravel()).reshape(xb.shape)
        out = np.where(inside, out, 0.0)
        if np.ndim(x) == 0 and np.ndim(u) == 0:
            return out[()]
        return out


def star(nu: float, f: PlaneFunction) -> PlaneFunction:
    """Involution ``f*(x,u) = m_nu(x,u) conj(f((x,u)^-))`` (an L^1 isometry)."""

    def ev(x, u):
        xi, ui = involution(np.asarray(x, dtype=float), np.asarray(u, dtype=float))
        return modular_weight(nu, u) * np.conj(np.asarray(f(xi, ui)))

    # the inverse sends the grid box to a sheared region; keep the same box
    # and let the evaluator reach outside through f's own extension
    vals = ev(f.x_grid[None, :], f.u_grid[:, None])
    return PlaneFunction(f.x_grid, f.u_grid, vals, closed_form=ev)


def haar_integral(nu: float, f: PlaneFunction, q: int = 6):
    """``iint f(x,u) x^{nu-1} dx du`` over the grid box."""
    x_nodes, x_w = measure_rule(nu, f.x_grid, q)
    u_nodes, u_w = cell_rule(f.u_grid, q)
    vals = np.asarray(f(x_nodes[None, :], u_nodes[:, None]))
    total = np.einsum("u,x,ux->", u_w, x_w, vals)
    return complex(total) if np.iscomplexobj(vals) else float(total)


def slice_function(f: PlaneFunction, v: float, interpolation: str = "cubic") -> RadialFunction:
    """The x-section ``f(., v)`` as a half-line function."""
    if f.closed_form is not None:
        fn = f.closed_form
        closed = lambda x_arr: np.asarray(fn(np.asarray(x_arr, dtype=float), v))
        return RadialFunction(f.x_grid, closed(f.x_grid), interpolation, closed)
    vals = np.asarray(f(f.x_grid, np.full_like(f.x_grid, v)))
    return RadialFunction(f.x_grid, vals, interpolation)


def plane_transform(nu: float, f: PlaneFunction, xi, v: float, q: int = 8,
                    tail_tol: float = math.inf):
    """Partial transform ``(H tensor id) f(xi, v)``: transform of the v-slice.

    Per-slice tail warnings are off by default (``tail_tol=inf``): the zero
    extension beyond the grid box is the plane-level truncation convention,
    accounted for when the box is chosen.
    """
    from .hankel import hankel_transform

    return hankel_transform(nu, slice_function(f, v), xi, q=q, tail_tol=tail_tol)


def _chord(x, y, omega):
    return np.sqrt((x - y) ** 2 + 2.0 * x * y * (1.0 - omega))


def right_translate(nu: float, f: PlaneFunction, point,
                    n_omega: int = 24) -> PlaneFunction:
    """Right translation by ``point = (x0, u0)``:
    ``(r_{(x0,u0)} f)(y,v) = tau^[e^v x0] f(., u0 + v)(y)``."""
    x0, u0 = float(point[0]), float(point[1])
    rule = angular_rule(nu, n_omega)

    def ev(y, v):
        y_arr = np.asarray(y, dtype=float)
        v_arr = np.asarray(v, dtype=float)
        yb, vb = np.broadcast_arrays(y_arr, v_arr)
        z = _chord(np.exp(vb)[..., None] * x0, yb[..., None], rule.nodes)
        vals = np.asarray(f(z, (u0 + vb)[..., None]))
        return vals @ rule.weights

    vals = ev(f.x_grid[None, :], f.u_grid[:, None])
    return PlaneFunction(f.x_grid, f.u_grid, vals, closed_form=ev)


def _v_rule(u_grid: np.ndarray, qv: int, n_panels: Optional[int] = None,
            max_panels: int = 48):
    span = u_grid[-1] - u_grid[0]
    if n_panels is None:
        n_panels = int(min(max_panels, max(8, math.ceil(span * 4))))
    panels = np.linspace(u_grid[0], u_grid[-1], n_panels + 1)
    return cell_rule(panels, qv)


def diamond(nu: float, f: PlaneFunction, g: PlaneFunction, q: int = 6,
            n_omega: int = 24, qv: int = 6, v_panels: Optional[int] = None,
            method: str = "auto", out_grids=None, n_bins: int = 1024) -> PlaneFunction:
    """Group convolution ``f diamond g`` on the plane.

    Combines, for every level v, the half-line convolution of the v-slice
    of f with the e^v-dilated (u-v)-slice of g, then integrates over v
    (Gauss-Legendre panels over f's u-range).

    method "direct" evaluates g at every chord point (cost grows with the
    product of all grid sizes); "binned" pushes the chord-point weights onto
    a uniform bin grid in the dilated variable first, then contracts with g
    sampled on the bins (linear spreading, second-order accurate).  "auto"
    picks "direct" for small problems.  Mass falling beyond g's support is
    dropped (extension by zero); the binned path reports an upper bound for
    the induced error in the ``clipped_mass`` attribute of the result.
    ``v_panels`` overrides the number of level-integral panels (needed when
    g is much narrower in u than f).
    """
    if out_grids is None:
        x_out, u_out = f.x_grid, f.u_grid
    else:
        x_out, u_out = (np.asarray(out_grids[0], dtype=float),
                        np.asarray(out_grids[1], dtype=float))
    rule = angular_rule(nu, n_omega)
    y_nodes, y_w = measure_rule(nu, f.x_grid, q)
    v_nodes, v_w = _v_rule(f.u_grid, qv, v_panels)

    work = x_out.size * y_nodes.size * rule.nodes.size * u_out.size * v_nodes.size
    if method == "auto":
        method = "direct" if work <= 2.0e8 else "binned"

    # chord addresses are independent of v and u
    Z = _chord(x_out[:, None, None], y_nodes[None, :, None],
               rule.nodes[None, None, :])  # (nx, ny, nw)
    f_rows = np.asarray(f(y_nodes[None, :], v_nodes[:, None]))  # (nv, ny)
    out = np.zeros((u_out.size, x_out.size),
                   dtype=np.result_type(f.values, g.values))
    clipped = 0.0

    if method == "direct":
        for iv, (v, wv) in enumerate(zip(v_nodes, v_w)):
            amp = wv * math.exp(-nu * v)
            base = y_w * f_rows[iv]  # (ny,)
            zz = math.exp(-v) * Z
            gz = np.asarray(g(zz[None, :, :, :], (u_out - v)[:, None, None, None]))
            out += amp * np.einsum("uxyw,y,w->ux", gz, base, rule.weights)
    elif method == "binned":
        h = g.x_max / n_bins
        nzp = n_bins + 2  # last bin collects (and zeroes) the overflow
        ix_flat = np.repeat(np.arange(x_out.size), y_nodes.size * rule.nodes.size)
        z_centers = np.arange(n_bins + 1) * h
        for iv, (v, wv) in enumerate(zip(v_nodes, v_w)):
            amp = wv * math.exp(-nu * v)
            W = (y_w * f_rows[iv])[:, None] * rule.weights[None, :]  # (ny, nw)
            addr = (math.exp(-v) * Z).ravel() / h
            over = addr > n_bins
            W_flat = np.broadcast_to(W, Z.shape).ravel()
            if np.any(over):
                clipped += abs(amp) * float(np.sum(np.abs(W_flat[over])))
            i0 = np.minimum(addr.astype(np.int64), n_bins)
            frac = np.clip(addr - i0, 0.0, 1.0)
            idx = ix_flat * nzp + i0
            P = (np.bincount(idx, W_flat * (1.0 - frac), minlength=x_out.size * nzp)
                 + np.bincount(idx + 1, W_flat * frac, minlength=x_out.size * nzp))
            P = P.reshape(x_out.size, nzp)[:, :n_bins + 1]
            G = np.asarray(g(z_centers[None, :], (u_out - v)[:, None]))  # (nu, nz)
            out += amp * (G @ P.T)
    else:
        raise ValueError(f"unknown method {method!r}")

    result = PlaneFunction(x_out, u_out, out)
    # bound on the error mass from zero-extending g past its box: dropped
    # pushforward weight times the largest |g| on the clipping edge
    edge = float(np.max(np.abs(np.asarray(g(np.full_like(g.u_grid, g.x_max),
                                            g.u_grid)))))
    result.clipped_mass = clipped * edge
    return result


def gradient(nu: float, f: PlaneFunction, reflect_even: bool = True):
    """Left-invariant derivatives ``(Y_0 f, Y_1 f) = (d/du f, e^u d/dx f)``.

    ``reflect_even`` extends f evenly across x = 0 (appropriate for
    functions radial in the first variable).
    """
    if f.closed_form is not None and abs(f.x_grid[0]) < 1e-300:
        hx = 5e-3
        hu = 5e-3
        offs = np.array([-2.0, -1.0, 1.0, 2.0])
        c1 = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0

        def ev0(x, u):
            x_arr, u_arr = np.broadcast_arrays(np.asarray(x, float), np.asarray(u, float))
            fp = np.asarray(f(x_arr[..., None], u_arr[..., None] + hu * offs))
            return (fp @ c1) / hu

        def ev1(x, u):
            x_arr, u_arr = np.broadcast_arrays(np.asarray(x, float), np.asarray(u, float))
            pts = x_arr[..., None] + hx * offs
            if reflect_even:
                pts = np.abs(pts)
            fp = np.asarray(f(pts, u_arr[..., None]))
            return np.exp(u_arr) * (fp @ c1) / hx

        g0 = PlaneFunction(f.x_grid, f.u_grid,
                           ev0(f.x_grid[None, :], f.u_grid[:, None]), closed_form=ev0)
        g1 = PlaneFunction(f.x_grid, f.u_grid,
                           ev1(f.x_grid[None, :], f.u_grid[:, None]), closed_form=ev1)
        return g0, g1
    Du = derivative_matrix(f.u_grid, 1)
    Dx = derivative_matrix(f.x_grid, 1, reflect_even=reflect_even)
    y0 = Du @ f.values
    y1 = np.exp(f.u_grid)[:, None] * (f.values @ Dx.T)
    return (PlaneFunction(f.x_grid, f.u_grid, y0),
            PlaneFunction(f.x_grid, f.u_grid, y1))


def ball_box(center, r: float):
    """Bounding box of the metric ball: the ball of radius r at (x,u) is
    contained in ``[(x - e^u sinh r)_+, x + e^u sinh r) x [u-r, u+r)``,
    which in turn sits inside the ball of radius 3r."""
    x, u = float(center[0]), float(center[1])
    half = math.exp(u) * math.sinh(r)
    return (max(x - half, 0.0), x + half, u - r, u + r)


_WEIGHT_TABLE = {
    # weight name -> (double-power indices (a, b) of s, exponential rate c
    #                 in e^{c s / 2}, u-restriction)
    "1": (lambda nu, k: (nu, 1.0), lambda nu, k: nu, None),
    "x^k": (lambda nu, k: (nu + k, 0.0), lambda nu, k: 2 * k + nu, None),
    "x^k_strip": (lambda nu, k: (nu + k, 0.0), lambda nu, k: k + nu, "u<=1"),
    "sinh^k": (lambda nu, k: (nu + k, 0.0), lambda nu, k: 2 * k + nu, None),
    "u^k_strip": (lambda nu, k: (nu + k, 0.0), lambda nu, k: nu, "|u|<=1"),
}


def _weight_factor(weight: str, k: int, x, u):
    if weight == "1":
        return np.ones_like(np.broadcast_arrays(x, u)[0])
    if weight in ("x^k", "x^k_strip"):
        return np.asarray(x) ** k * np.ones_like(u)
    if weight == "sinh^k":
        return np.abs(np.sinh(u)) ** k * np.ones_like(x)
    if weight == "u^k_strip":
        return np.abs(u) ** k * np.ones_like(x)
    raise ValueError(f"unknown weight {weight!r}")


def weighted_radial_integral(nu: float, profile, weight: str = "1", k: int = 0,
                             x_max: float = 120.0, u_max: float = 12.0,
                             n: int = 400, q: int = 6) -> float:
    """LHS of the modular-weight comparison:
    ``iint m^{1/2}(u) w(x,u) profile(|(x,u)|_rho) dmu~``.

    ``weight`` selects w from {"1", "x^k", "x^k_strip", "sinh^k",
    "u^k_strip"} (strips restrict u to u <= 1 resp. |u| <= 1).  The profile
    must decay faster than ``e^{-nu s/2}`` (plus the weight's growth) for
    the integral to converge; the companion RHS is
    :func:`radial_comparison_integral`.
    """
    if weight not in _WEIGHT_TABLE:
        raise ValueError(f"unknown weight {weight!r}")
    restrict = _WEIGHT_TABLE[weight][2]
    u_lo, u_hi = -u_max, u_max
    if restrict == "u<=1":
        u_hi = 1.0
    elif restrict == "|u|<=1":
        u_lo, u_hi = -1.0, 1.0
    x_nodes, x_w = measure_rule(nu, loglinear_grid(x_max, n), q)
    u_nodes, u_w = cell_rule(np.linspace(u_lo, u_hi, max(64, int(4 * (u_hi - u_lo)))), q)
    X = x_nodes[None, :]
    U = u_nodes[:, None]
    r = group_norm(X, U)
    vals = (np.exp(-nu * U / 2.0) * _weight_factor(weight, k, X, U)
            * np.asarray(profile(r)))
    return float(np.einsum("u,x,ux->", u_w, x_w, vals))


def radial_comparison_integral(nu: float, profile, weight: str = "1", k: int = 0,
                               s_max: float = 60.0, n: int = 400, q: int = 6) -> float:
    """RHS of the modular-weight comparison:
    ``int_0^inf profile(s) s^[a,b] e^{c s/2} ds`` with (a, b, c) matched to
    the weight (the two sides agree up to nu-dependent constants)."""
    from .specfun import double_power

    if weight not in _WEIGHT_TABLE:
        raise ValueError(f"unknown weight {weight!r}")
    ab_fn, c_fn, _ = _WEIGHT_TABLE[weight]
    a, b = ab_fn(nu, k)
    c = c_fn(nu, k)
    s_nodes, s_w = cell_rule(loglinear_grid(s_max, n), q)
    s_nodes = s_nodes  # starts just above 0; the integrand vanishes there
    vals = np.asarray(profile(s_nodes)) * double_power(s_nodes, a, b) \
        * np.exp(c * s_nodes / 2.0)
    return float(np.sum(s_w * vals))


def integral_kernel(nu: float, K: PlaneFunction, p, q_point,
                    n_omega: int = 24):
    """Two-point kernel of the operator ``f -> f diamond K``:
    ``k(p, q) = m_nu(q) (r_p K)(q^-)``, evaluated pointwise.

    Broadcasting applies across p = (x,u), q = (y,v) arrays.
    """
    x, u = np.asarray(p[0], dtype=float), np.asarray(p[1], dtype=float)
    y, v = np.asarray(q_point[0], dtype=float), np.asarray(q_point[1], dtype=float)
    rule = angular_rule(nu, n_omega)
    ev = np.exp(-v)
    z = _chord((ev * y)[..., None], (ev * x)[..., None], rule.nodes)
    vals = np.asarray(K(z, (u - v)[..., None]))
    return np.exp(-nu * v) * (vals @ rule.weights)
