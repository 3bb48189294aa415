r"""Heat semigroup kernels on the solvable group built over the half-line.

The kernel of :math:`e^{-t\Delta_\nu}` is radial after removing the square
root of the modular weight:

.. math:: K_{e^{-t\Delta_\nu}}(x, u)
          = \frac{2^{(2-\nu)/2}}{\Gamma(\nu/2)}\, e^{-\nu u/2}\,
            H_{\nu, t}(|(x, u)|_\rho),

and the radial profile has a one-dimensional integral representation

.. math:: H_{\nu, t}(r) = \int_0^\infty \Psi_t(\xi)\, \xi^{-\nu/2}
          e^{-\cosh r/\xi}\, d\xi,

with the weight

.. math:: \Psi_t(\xi) = \frac{e^{\pi^2/4t}}{\xi^2 \sqrt{4\pi^3 t}}
          \int_0^\infty \sinh\theta\, \sin\frac{\pi\theta}{2t}\,
          e^{-\theta^2/4t - \cosh\theta/\xi}\, d\theta .

At ``nu = 2`` the profile closes up:
``H(r) = (16 pi t^3)^{-1/2} (r / sinh r) e^{-r^2/4t}``.

Profiles at different orders are linked two ways, both implemented here:
``(-(1/sinh r) d/dr)`` raises the order by two (`radial_descent`), and the
weighted Abel-type integral lowers it by ``2 beta`` (`abel_lift`).  The same
pair transports the flat half-line profile (order zero, a plain cosine
transform of the multiplier) to any order: `multiplier_profile`.  Choosing a
compactly supported order-zero profile — the `bump_window` preset, whose
multiplier `bump_multiplier` is an explicit trigonometric sum — produces
kernels with exact finite propagation.

The oscillatory prefactor ``e^{pi^2/4t}`` makes the theta integral lose
about ``pi^2 / (4 t ln 10)`` decimal digits to cancellation, which is why
``t`` outside ``[0.05, 20]`` is refused without ``force=True`` and a warning
is emitted once the loss passes ten digits even inside the range.
"""

from __future__ import annotations

import math
import warnings
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicSpline
from scipy.special import gamma, roots_jacobi

from ._grids import loglinear_grid
from .gnu_space import PlaneFunction, group_norm
from .specfun import NuParam

__all__ = [
    "T_SAFE_RANGE",
    "psi_t",
    "heat_profile",
    "euclidean_heat_profile",
    "radial_descent",
    "abel_lift",
    "multiplier_profile",
    "bump_window",
    "bump_multiplier",
    "heat_kernel_gnu",
    "heat_kernel_plane_direct",
]

T_SAFE_RANGE = (0.05, 20.0)

_DIGIT_WARN = 10.0


def _check_t(t: float, force: bool) -> None:
    if not (T_SAFE_RANGE[0] <= t <= T_SAFE_RANGE[1]):
        if not force:
            raise ValueError(
                f"t={t} outside the reliable range {T_SAFE_RANGE}; the "
                f"oscillatory prefactor exp(pi^2/4t) loses about "
                f"{math.pi ** 2 / (4 * t * math.log(10)):.1f} digits — pass "
                f"force=True to proceed anyway")
        if t < T_SAFE_RANGE[0]:
            warnings.warn(f"t={t} below {T_SAFE_RANGE[0]}: results may be "
                          f"meaningless in double precision", RuntimeWarning)
        else:
            warnings.warn(f"t={t} above {T_SAFE_RANGE[1]}: outside the "
                          f"validated range", RuntimeWarning)
    else:
        lost = math.pi ** 2 / (4 * t * math.log(10))
        if lost > _DIGIT_WARN:
            warnings.warn(
                f"t={t}: about {lost:.1f} digits lost to cancellation in "
                f"the theta integral; absolute accuracy is reduced",
                RuntimeWarning)


def _theta_rule(t: float, q: int = 16):
    """Gauss-Legendre panels aligned to half-periods of sin(pi theta / 2t),
    subdivided so each panel also resolves the Gaussian arch scale sqrt(t)."""
    subdiv = max(1, math.ceil(2.0 * math.sqrt(t)))
    width = 2.0 * t / subdiv
    budget = 60.0
    theta_max = 2.0 * t + 2.0 * math.sqrt(t * (budget + t))
    n_panels = math.ceil(theta_max / width)
    s, w = leggauss(q)
    edges = width * np.arange(n_panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * width
    nodes = (mid[:, None] + half * s[None, :]).ravel()
    weights = (half * np.broadcast_to(w, (n_panels, q))).ravel()
    return nodes, weights


def psi_t(t: float, xi, *, force: bool = False, q: int = 16):
    """Subordination-type weight Psi_t at ``xi > 0`` (vectorized).

    ``|Psi_t(xi)|`` is O(xi^{-2}) for large xi and decays like
    ``exp(-1/xi)`` as xi -> 0.
    """
    _check_t(t, force)
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    if np.any(xi_arr <= 0):
        raise ValueError("xi must be positive")
    theta, w = _theta_rule(t, q)
    # sinh(theta) e^{-theta^2/4t - cosh(theta)/xi} assembled in log space so
    # large-theta panels cannot overflow
    expo = theta[None, :] - theta[None, :] ** 2 / (4 * t) \
        - np.cosh(theta)[None, :] / xi_arr[:, None]
    vals = 0.5 * np.exp(expo) * (-np.expm1(-2 * theta[None, :])) \
        * np.sin(math.pi * theta[None, :] / (2 * t))
    integral = vals @ w
    pref = math.exp(math.pi ** 2 / (4 * t)) / (xi_arr ** 2
                                               * math.sqrt(4 * math.pi ** 3 * t))
    out = pref * integral
    if np.isscalar(xi) or np.ndim(xi) == 0:
        return float(out[0])
    return out.reshape(np.shape(xi))


def _xi_rule(s_lo: float, s_hi: float, q: int = 12):
    """Log-spaced Gauss-Legendre rule for the xi integral, s = ln xi."""
    width = 0.5 * math.log(10.0)
    n_panels = max(4, math.ceil((s_hi - s_lo) / width))
    s, w = leggauss(q)
    edges = np.linspace(s_lo, s_hi, n_panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1] - edges[0])
    nodes = (mid[:, None] + half * s[None, :]).ravel()
    weights = (half * np.broadcast_to(w, (n_panels, q))).ravel()
    return nodes, weights


def _profile_from_psi(nu: float, t: float, r: np.ndarray, force: bool,
                      q: int = 12) -> np.ndarray:
    # refuse out-of-range t before sizing the xi grid (it grows like 1/t)
    _check_t(t, force)
    ch = np.cosh(r)
    ch_min, ch_max = float(ch.min()), float(ch.max())
    s_lo = math.log(ch_min / 42.0)
    # polynomial xi-tail: push far enough that the truncated piece is tiny
    # against the exponentially small profile at the largest radius
    tail = (2.0 / nu) * (22.0 + float(np.max(r)) ** 2 / (4 * t))
    s_hi = math.log(max(ch_max, 1.0)) + tail + 2.0
    s_nodes, s_w = _xi_rule(s_lo, s_hi, q)
    xi_nodes = np.exp(s_nodes)
    psi_vals = psi_t(t, xi_nodes, force=force)
    coef = s_w * psi_vals * np.exp(s_nodes * (1.0 - nu / 2.0))
    mat = np.exp(-ch[:, None] * np.exp(-s_nodes)[None, :])
    return mat @ coef


def heat_profile(nu: float, t: float, method: str = "auto", *,
                 force: bool = False) -> Callable:
    """Radial profile ``H_{nu,t}`` of the heat kernel, as a vectorized
    callable of the geodesic radius.

    ``method="auto"`` uses the closed form at nu = 2 and the Psi-weight
    quadrature otherwise; ``"psi"`` forces the quadrature (useful for
    cross-checking), ``"closed"`` demands the closed form.
    """
    NuParam(nu)
    if t <= 0:
        raise ValueError("t must be positive")
    if method not in ("auto", "psi", "closed"):
        raise ValueError(f"unknown method {method!r}")
    if method == "closed" and abs(nu - 2.0) > 1e-14:
        raise ValueError("closed form is only available at nu=2")

    if abs(nu - 2.0) <= 1e-14 and method in ("auto", "closed"):
        amp = (16 * math.pi * t ** 3) ** -0.5

        def closed(r):
            r_arr = np.atleast_1d(np.asarray(r, dtype=float))
            ratio = np.where(np.abs(r_arr) < 1e-12, 1.0,
                             r_arr / np.sinh(np.where(np.abs(r_arr) < 1e-12,
                                                      1.0, r_arr)))
            out = amp * ratio * np.exp(-r_arr ** 2 / (4 * t))
            if np.isscalar(r) or np.ndim(r) == 0:
                return float(out[0])
            return out.reshape(np.shape(r))

        return closed

    def from_psi(r):
        r_arr = np.atleast_1d(np.asarray(r, dtype=float)).ravel()
        out = _profile_from_psi(nu, t, np.abs(r_arr), force)
        if np.isscalar(r) or np.ndim(r) == 0:
            return float(out[0])
        return out.reshape(np.shape(r))

    return from_psi


def euclidean_heat_profile(t: float) -> Callable:
    """Order-zero (flat half-line) heat profile ``(4 pi t)^{-1/2} e^{-x^2/4t}``."""
    amp = (4 * math.pi * t) ** -0.5

    def h0(x):
        x_arr = np.asarray(x, dtype=float)
        return amp * np.exp(-x_arr ** 2 / (4 * t))

    return h0


_D1_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])
_D1_COEF = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
_D1_ONESIDED = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0


def radial_descent(fn: Callable, k: int = 1, h: float = 5e-3) -> Callable:
    """``(-(1/sinh r) d/dr)^k`` of an even radial profile, as a callable.

    Fourth-order stencils; near the origin the derivative is taken in the
    variable ``y = cosh r`` (where the operator is exactly ``-d/dy``) with a
    one-sided stencil, avoiding the 0/0 of the r-form.
    """
    if k < 0:
        raise ValueError("k must be a nonnegative integer")
    if k == 0:
        return fn
    inner = radial_descent(fn, k - 1, h)

    def descended(r):
        r_arr = np.atleast_1d(np.asarray(r, dtype=float)).ravel()
        r_abs = np.abs(r_arr)
        out = np.empty_like(r_abs)

        near = r_abs < 4 * h
        if np.any(near):
            y = np.cosh(r_abs[near])
            pts = y[:, None] + h * np.arange(5)[None, :]
            vals = np.asarray(inner(np.arccosh(pts)))
            out[near] = -(vals @ _D1_ONESIDED) / h
        far = ~near
        if np.any(far):
            pts = np.abs(r_abs[far][:, None] + h * _D1_OFFSETS[None, :])
            vals = np.asarray(inner(pts))
            out[far] = -(vals @ _D1_COEF) / (h * np.sinh(r_abs[far]))

        if np.isscalar(r) or np.ndim(r) == 0:
            return float(out[0])
        return out.reshape(np.shape(r))

    return descended


def abel_lift(fn: Callable, beta: float, r, *, q: int = 16,
              span: float = 40.0, y1=None):
    r"""Weighted Abel-type integral lowering the order by ``2 beta``:

    .. math:: (L_\beta f)(r) = \frac{1}{\Gamma(\beta)} \int_r^\infty
              \sinh x\, (\cosh x - \cosh r)^{\beta-1} f(x)\, dx .

    Substituting ``y = cosh x - cosh r`` makes the weight a pure power
    ``y^{beta-1}``, absorbed exactly by a Gauss-Jacobi anchor panel, with
    geometric Gauss-Legendre panels carrying the tail out to
    ``x = r + span``.  Requires ``0 < beta``; at ``beta = 1`` this is the
    plain integral.

    ``y1`` overrides the anchor-panel width (scalar or per-radius array):
    profiles with a power singularity at the origin need an anchor that
    shrinks with r, or the Gauss-Jacobi nodes straddle the blowup.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    r_arr = np.atleast_1d(np.asarray(r, dtype=float)).ravel()
    nodes_j, weights_j = roots_jacobi(q, 0.0, beta - 1.0)
    nodes_g, weights_g = leggauss(q)
    out = np.empty_like(r_arr)
    inv_gamma = 1.0 / gamma(beta)
    y1_arr = None if y1 is None else np.broadcast_to(
        np.asarray(y1, dtype=float), r_arr.shape)
    for i, ri in enumerate(np.abs(r_arr)):
        ch = math.cosh(ri)
        width0 = y1_arr[i] if y1_arr is not None \
            else 0.5 * math.sinh(ri) + 0.25
        # anchor panel [0, width0] with the y^{beta-1} weight exact
        y_a = width0 * (1.0 + nodes_j) / 2.0
        w_a = (width0 / 2.0) ** beta * weights_j
        total = float(np.dot(w_a, fn(np.arccosh(ch + y_a))))
        # geometric panels to y_max = cosh(r + span) - cosh(r)
        y_max = math.cosh(ri + span) - ch
        lo = width0
        while lo < y_max:
            hi = min(2.0 * lo, y_max)
            ym = 0.5 * (hi + lo) + 0.5 * (hi - lo) * nodes_g
            wm = 0.5 * (hi - lo) * weights_g * ym ** (beta - 1.0)
            total += float(np.dot(wm, fn(np.arccosh(ch + ym))))
            lo = hi
        out[i] = inv_gamma * total
    if np.isscalar(r) or np.ndim(r) == 0:
        return float(out[0])
    return out.reshape(np.shape(r))


def multiplier_profile(nu: float, h0: Callable, *, descent_h: float = 5e-3,
                       q: int = 16, span: float = 40.0) -> Callable:
    """Profile of ``F(Delta_nu)`` built from the order-zero profile of the
    same multiplier (the cosine transform of F on the half-line).

    For even nu this is ``nu/2`` descents of h0; fractional orders take one
    extra descent and an Abel lift with ``beta = 1 - frac(nu/2)``.
    """
    NuParam(nu)
    n_whole = int(math.floor(nu / 2.0 + 1e-12))
    frac = nu / 2.0 - n_whole
    if frac < 1e-12:
        return radial_descent(h0, n_whole, descent_h)
    inner = radial_descent(h0, n_whole + 1, descent_h)
    beta = 1.0 - frac

    def lifted(r):
        return abel_lift(inner, beta, r, q=q, span=span)

    return lifted


def bump_window(r0: float, m: int = 6) -> Callable:
    """Compactly supported order-zero profile ``cos^{2m}(pi x / 2 r0)`` on
    ``|x| < r0``, identically zero beyond (C^{2m-1} at the edge)."""
    if r0 <= 0:
        raise ValueError("r0 must be positive")

    def h0(x):
        x_arr = np.asarray(x, dtype=float)
        inside = np.abs(x_arr) < r0
        c = np.cos(math.pi * np.where(inside, x_arr, 0.0) / (2 * r0))
        return np.where(inside, c ** (2 * m), 0.0)

    return h0


def bump_multiplier(r0: float, m: int = 6) -> Callable:
    """The spectral multiplier whose order-zero profile is `bump_window`:

    ``F(lam) = 2 int_0^{r0} cos^{2m}(pi x / 2 r0) cos(sqrt(lam) x) dx``,

    an explicit finite sum via the binomial expansion of the cosine power.
    Its Fourier transform in sqrt(lam) is supported in ``[-r0, r0]``, which
    is the finite-propagation radius.
    """
    if r0 <= 0:
        raise ValueError("r0 must be positive")
    js = np.arange(0, m + 1)
    coef = np.array([math.comb(2 * m, m - j) for j in js], dtype=float)
    coef *= 2.0 ** (1 - 2 * m)
    coef[0] *= 0.5
    a = js * math.pi / r0  # inner frequencies

    def half_integral(b):
        # int_0^{r0} cos(b x) dx = r0 sinc(b r0 / pi)
        return r0 * np.sinc(b * r0 / math.pi)

    def F(lam):
        lam_arr = np.asarray(lam, dtype=float)
        xi = np.sqrt(np.maximum(lam_arr, 0.0))
        acc = np.zeros_like(xi)
        for cj, aj in zip(coef, a):
            acc = acc + cj * (half_integral(aj - xi) + half_integral(aj + xi))
        return acc

    return F


_LIFT_CONST = lambda nu: 2.0 ** ((2.0 - nu) / 2.0) / gamma(nu / 2.0)


def heat_kernel_gnu(nu: float, t: float, x_max: Optional[float] = None,
                    u_max: Optional[float] = None, nx: int = 161,
                    nu_pts: int = 121, table_n: int = 3001,
                    tail_exponent: float = 32.0, *,
                    force: bool = False) -> PlaneFunction:
    """Heat kernel on the group as a PlaneFunction with an attached closed
    form: the modular-weight lift of the radial profile,
    ``K = 2^{(2-nu)/2}/Gamma(nu/2) e^{-nu u/2} H(|(x,u)|_rho)``.

    The profile is tabulated once on a dense radius grid and evaluated
    through a cubic spline (exact closed form at nu=2), cut at the radius
    where the Gaussian bound falls below ``exp(-tail_exponent)``.
    """
    param = NuParam(nu)
    if t <= 0:
        raise ValueError("t must be positive")
    r_cut = t * nu + math.sqrt((t * nu) ** 2 + 4 * t * tail_exponent)
    if u_max is None:
        u_max = r_cut + 0.5
    if x_max is None:
        x_max = math.sqrt(2.0 * math.exp(r_cut) * math.cosh(r_cut)) + 1.0
    c_lift = _LIFT_CONST(nu)

    if abs(nu - 2.0) <= 1e-14:
        prof = heat_profile(nu, t)
    else:
        table_r = np.linspace(0.0, r_cut + 0.25, table_n)
        table_h = _profile_from_psi(nu, t, table_r, force)
        spline = CubicSpline(table_r, table_h, bc_type=((1, 0.0), "not-a-knot"))

        def prof(r):
            r_arr = np.asarray(r, dtype=float)
            inside = r_arr <= r_cut
            # the profile is nonnegative; clip the spline's sub-1e-18
            # undershoot near the tail cut
            return np.where(inside,
                            np.maximum(spline(np.where(inside, r_arr, 0.0)),
                                       0.0), 0.0)

    def kernel(x, u):
        x_arr = np.asarray(x, dtype=float)
        u_arr = np.asarray(u, dtype=float)
        s = group_norm(np.abs(x_arr), u_arr)
        vals = c_lift * np.exp(-nu * u_arr / 2.0) * prof(s)
        return np.where(s <= r_cut, vals, 0.0)

    x_grid = loglinear_grid(x_max, nx)
    u_grid = np.linspace(-u_max, u_max, nu_pts)
    values = kernel(x_grid[None, :], u_grid[:, None])
    return PlaneFunction(x_grid, u_grid, values, closed_form=kernel)


def heat_kernel_plane_direct(nu: float, t: float, x, u, *,
                             force: bool = False):
    r"""Heat kernel by the direct plane representation

    .. math:: K(x, u) = \frac{2}{\Gamma(\nu/2)} \int_0^\infty \Psi_t(\xi)\,
              (2\xi e^u)^{-\nu/2} \exp(-\cosh u/\xi - x^2/(2\xi e^u))\, d\xi,

    bypassing the radial lift — an independent route used to cross-check
    `heat_kernel_gnu`'s geometry.
    """
    NuParam(nu)
    x_arr = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    u_arr = np.atleast_1d(np.asarray(u, dtype=float)).ravel()
    x_b, u_b = np.broadcast_arrays(x_arr, u_arr)
    # cosh u + x^2 / (2 e^u) is cosh of the group norm: same xi window as
    # the radial route
    ch = np.cosh(u_b) + x_b ** 2 * np.exp(-u_b) / 2.0
    s_lo = math.log(float(ch.min()) / 42.0)
    r_eff = np.arccosh(np.maximum(ch, 1.0))
    tail = (2.0 / nu) * (22.0 + float(r_eff.max()) ** 2 / (4 * t))
    s_hi = math.log(float(ch.max())) + tail + 2.0 if ch.max() > 1 else tail + 2.0
    s_nodes, s_w = _xi_rule(s_lo, s_hi)
    xi_nodes = np.exp(s_nodes)
    psi_vals = psi_t(t, xi_nodes, force=force)
    pref = 2.0 / gamma(nu / 2.0)
    coef = s_w * psi_vals * np.exp(s_nodes * (1.0 - nu / 2.0)) * 2.0 ** (-nu / 2.0)
    expo = -ch[:, None] * np.exp(-s_nodes)[None, :]
    mat = np.exp(expo)
    out = pref * np.exp(-nu * u_b / 2.0) * (mat @ coef)
    shape = np.broadcast(np.asarray(x), np.asarray(u)).shape
    if shape == ():
        return float(out[0])
    return out.reshape(shape)
