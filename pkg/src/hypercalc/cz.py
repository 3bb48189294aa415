r"""Dyadic-type covering machinery and the stopping-time decomposition.

Admissible sets are rectangles

.. math:: R_{m,l,u,r} = [m 2^l, (m+1) 2^l) \times [u-r, u+r),
          \qquad e^u \sinh(2r) \le 2^{l-1} < e^u \sinh(9r),

whose x-side is comparable to the metric scale :math:`e^u \sinh r`; each is
contained in the metric ball of radius 27r about its center and its
enlargement ``R* = {p : d(p, R) < r}`` has measure at most ``2^{nu+1}``
times the measure of R.  Every admissible set splits into two children that
partition it (halving either the x-interval or the u-interval), shrinking
measure by at most ``2^nu``.  A quasi-partition tiles the whole half-plane
by strips of geometrically growing radius; descending from it and stopping
the first time the local average of |f| reaches ``lambda/kappa`` (with
``kappa = max(27, 2^{nu+1})``) produces the good/bad splitting

.. math:: f = g + \sum_R b_R, \qquad b_R = (f - \mathrm{avg}_R f)\,1_R,

with mean-zero bad parts, ``||b_R||_1 <= 2 lambda mu(R)``, total bad
measure at most ``kappa ||f||_1 / lambda``, and ``||g||_inf <= lambda``.

Every integral here — the stopping predicate, the averages, and the
verification residuals — runs through one shared subcell midpoint rule with
exact measure weights, so the predicate and the verifier cannot disagree
about what an average is.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable, Optional

import numpy as np

__all__ = [
    "AdmissibleSet",
    "measure",
    "enlargement_box",
    "measure_enlarged",
    "children",
    "dist_to_set",
    "quasi_partition",
    "condition_c_set",
    "set_integral",
    "cz_decompose",
    "cz_verify",
    "atom_check",
    "CZDecomposition",
    "DecompositionError",
]


class DecompositionError(RuntimeError):
    """Raised when the stopping-time descent fails to terminate."""


@dataclasses.dataclass(frozen=True)
class AdmissibleSet:
    """Rectangle ``[m 2^l, (m+1) 2^l) x [u-r, u+r)`` indexed by integers m >= 0,
    l (any sign) and reals u, r > 0."""

    m: int
    l: int
    u: float
    r: float

    def __post_init__(self) -> None:
        if self.m < 0:
            raise ValueError("m must be a nonnegative integer")
        if self.r <= 0:
            raise ValueError("r must be positive")

    @property
    def x_lo(self) -> float:
        return math.ldexp(self.m, self.l)

    @property
    def x_hi(self) -> float:
        return math.ldexp(self.m + 1, self.l)

    @property
    def u_lo(self) -> float:
        return self.u - self.r

    @property
    def u_hi(self) -> float:
        return self.u + self.r

    @property
    def center(self) -> tuple[float, float]:
        return (math.ldexp(2 * self.m + 1, self.l - 1), self.u)

    def is_admissible(self) -> bool:
        scale = math.exp(self.u)
        side = math.ldexp(1.0, self.l - 1)
        return scale * math.sinh(2 * self.r) <= side < scale * math.sinh(9 * self.r)

    def contains(self, x, u) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        return ((self.x_lo <= x) & (x < self.x_hi)
                & (self.u_lo <= u) & (u < self.u_hi))

    def as_dict(self) -> dict:
        return {"m": self.m, "l": self.l, "u": self.u, "r": self.r}


def _power_difference(nu: float, a: int, b: int) -> float:
    # (b^nu - a^nu) for integers 0 <= a < b, stable for large a
    if a == 0:
        return float(b) ** nu
    fa = float(a)
    return fa ** nu * math.expm1(nu * math.log1p((b - a) / fa))


def measure(nu: float, R: AdmissibleSet) -> float:
    """``mu(R) = (2 r 2^{nu l} / nu) ((m+1)^nu - m^nu)``."""
    return (2.0 * R.r * 2.0 ** (nu * R.l) / nu
            * _power_difference(nu, R.m, R.m + 1))


def enlargement_box(R: AdmissibleSet) -> tuple[float, float, float, float]:
    """Box containing ``R* = {p : d(p, R) < r}``:
    ``[(x_lo - e^u sinh 2r)_+, x_hi + e^u sinh 2r) x [u-2r, u+2r)``."""
    pad = math.exp(R.u) * math.sinh(2 * R.r)
    return (max(R.x_lo - pad, 0.0), R.x_hi + pad, R.u - 2 * R.r, R.u + 2 * R.r)


def dist_to_set(x, u, R: AdmissibleSet) -> np.ndarray:
    """Metric distance from points (x, u) to the rectangle R (vectorized).

    The nearest x-coordinate inside R is the clamp of x; the nearest level is
    found by solving the stationarity condition ``sinh(v - u) = c e^{-v}``
    (monotone, bisected) and clamping to R's u-interval.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    x, u = np.broadcast_arrays(x, u)
    y = np.clip(x, R.x_lo, R.x_hi)
    c = (x - y) ** 2 * np.exp(-u) / 2.0

    v_lo = u.copy()
    v_hi = u + np.arcsinh(c * np.exp(-u)) + 1e-12
    for _ in range(60):
        v_mid = 0.5 * (v_lo + v_hi)
        g = np.sinh(v_mid - u) - c * np.exp(-v_mid)
        v_lo = np.where(g < 0, v_mid, v_lo)
        v_hi = np.where(g < 0, v_hi, v_mid)
    v = np.clip(0.5 * (v_lo + v_hi), R.u_lo, R.u_hi)
    arg = np.cosh(u - v) + c * np.exp(u) * np.exp(-(u + v))
    return np.arccosh(np.maximum(arg, 1.0))


def measure_enlarged(nu: float, R: AdmissibleSet, n_u: int = 48,
                     bisect_steps: int = 48) -> float:
    """Measure of the enlargement ``R*`` by slicing: for each level u' in
    (u - 2r, u + 2r) the section is an interval found by bisection on the
    distance function, integrated with exact ``x^{nu-1}`` weights."""
    from numpy.polynomial.legendre import leggauss

    s, w = leggauss(n_u)
    u_nodes = R.u + 2 * R.r * s
    u_w = 2 * R.r * w
    box_lo, box_hi, _, _ = enlargement_box(R)

    def section(u_arr, lo, hi):
        # lo stays inside R*, hi outside; distance grows monotonically in x
        # away from R, so bisection pins the section edge
        lo = np.full_like(u_arr, lo) if np.isscalar(lo) else lo
        hi = np.full_like(u_arr, hi) if np.isscalar(hi) else hi
        for _ in range(bisect_steps):
            mid = 0.5 * (lo + hi)
            inside = dist_to_set(mid, u_arr, R) < R.r
            lo = np.where(inside, mid, lo)
            hi = np.where(inside, hi, mid)
        return 0.5 * (lo + hi)

    # left edge: between box_lo and R.x_lo (moving left increases distance);
    # right edge: between R.x_hi and box_hi
    left = section(u_nodes, R.x_lo, np.full_like(u_nodes, box_lo)) \
        if R.x_lo > box_lo else np.full_like(u_nodes, box_lo)
    right = section(u_nodes, R.x_hi, np.full_like(u_nodes, box_hi))
    vals = (np.maximum(right, 0.0) ** nu - np.maximum(left, 0.0) ** nu) / nu
    return float(np.sum(u_w * vals))


def children(R: AdmissibleSet) -> tuple[list[AdmissibleSet], str]:
    """The two admissible children partitioning R.

    First kind halves the x-interval (allowed when ``e^u sinh 2r <= 2^{l-2}``);
    otherwise the u-interval splits with radius r/2.
    """
    if math.exp(R.u) * math.sinh(2 * R.r) <= math.ldexp(1.0, R.l - 2):
        kids = [AdmissibleSet(2 * R.m, R.l - 1, R.u, R.r),
                AdmissibleSet(2 * R.m + 1, R.l - 1, R.u, R.r)]
        return kids, "split-x"
    kids = [AdmissibleSet(R.m, R.l, R.u - R.r / 2, R.r / 2),
            AdmissibleSet(R.m, R.l, R.u + R.r / 2, R.r / 2)]
    return kids, "split-u"


def _level_for(u: float, r: float) -> int:
    """Smallest integer l with ``e^u sinh(2r) <= 2^{l-1}``."""
    target = math.exp(u) * math.sinh(2 * r)
    l = 1 + math.ceil(math.log2(target))
    while math.ldexp(1.0, l - 1) < target:  # guard against log roundoff
        l += 1
    while l > -10_000 and math.ldexp(1.0, l - 2) >= target:
        l -= 1
    return l


def quasi_partition(nu: float, min_measure: float,
                    window: tuple[float, float, float]) -> list[AdmissibleSet]:
    """Admissible sets tiling ``[0, x_hi) x [u_lo, u_hi)``, pairwise disjoint,
    each of measure strictly above ``min_measure``.

    The tiling consists of horizontal strips: the central strip has radius
    r0 (chosen as the smallest power of two making the smallest rectangle
    exceed ``min_measure``), and radii grow by a factor 3 with each step
    away, the strips exactly abutting.  Within a strip, the x-axis is cut at
    the admissible scale for that strip's level.  ``window`` is
    ``(x_hi, u_lo, u_hi)``.
    """
    x_hi_w, u_lo_w, u_hi_w = window
    if x_hi_w <= 0 or u_hi_w <= u_lo_w:
        raise ValueError("window must have positive extent")

    def smallest_measure(r0: float) -> float:
        l0 = _level_for(0.0, r0)
        return 2.0 * r0 * 2.0 ** (nu * l0) / nu

    k = 0
    while smallest_measure(2.0 ** k) <= min_measure:
        k += 1
        if k > 300:
            raise ValueError("threshold too large")
    while k > -300 and smallest_measure(2.0 ** (k - 1)) > min_measure:
        k -= 1
    r0 = 2.0 ** k

    def strip_params(n: int) -> tuple[float, float]:
        # centers/radii: r_n = 3^|n| r0, u_{n} = sign(n) (sum of previous
        # radii pattern): u_0 = 0, u_{n} = u_{n-1} + r_{n-1} + r_n
        r, u = r0, 0.0
        for _ in range(abs(n)):
            r_next = 3 * r
            u = u + r + r_next
            r = r_next
        return (math.copysign(u, n) if n != 0 else 0.0, r)

    sets: list[AdmissibleSet] = []
    n = 0
    order = [0]
    i = 1
    while True:
        u_n, r_n = strip_params(i)
        if u_n - r_n >= u_hi_w and -u_n + r_n <= u_lo_w:
            break
        order.extend([i, -i])
        i += 1
        if i > 200:
            break
    for n in order:
        u_n, r_n = strip_params(n)
        if u_n + r_n <= u_lo_w or u_n - r_n >= u_hi_w:
            continue
        l_n = _level_for(u_n, r_n)
        width = math.ldexp(1.0, l_n)
        m = 0
        while m * width < x_hi_w:
            sets.append(AdmissibleSet(m, l_n, u_n, r_n))
            m += 1
    return sets


def condition_c_set(l: int) -> AdmissibleSet:
    """The distinguished set at the origin for level l:
    ``R_{0, l, 0, r_l}`` with ``sinh(2 r_l) = 2^{l-1}`` (boundary-admissible)."""
    r_l = 0.5 * math.asinh(math.ldexp(1.0, l - 1))
    return AdmissibleSet(0, l, 0.0, r_l)


def _midpoint_rule(nu: float, R: AdmissibleSet, subcells: int,
                   window: Optional[tuple[float, float, float]] = None):
    """Shared subcell rule on R, clipped to the window when one is given.

    Clipping changes nothing for functions supported in the window (the
    integrand vanishes on the clipped-away part) but keeps the subcells at
    a resolution set by the window rather than by a possibly huge R."""
    x_lo, x_hi = R.x_lo, R.x_hi
    u_lo, u_hi = R.u_lo, R.u_hi
    if window is not None:
        wx_hi, wu_lo, wu_hi = window
        x_hi = min(x_hi, wx_hi)
        u_lo, u_hi = max(u_lo, wu_lo), min(u_hi, wu_hi)
    if x_hi <= x_lo or u_hi <= u_lo:
        z = np.zeros(0)
        return z, z, z, z
    x_edges = np.linspace(x_lo, x_hi, subcells + 1)
    u_edges = np.linspace(u_lo, u_hi, subcells + 1)
    wx = (x_edges[1:] ** nu - x_edges[:-1] ** nu) / nu
    wu = np.diff(u_edges)
    xm = 0.5 * (x_edges[1:] + x_edges[:-1])
    um = 0.5 * (u_edges[1:] + u_edges[:-1])
    return xm, um, wx, wu


def set_integral(nu: float, fn: Callable, R: AdmissibleSet, subcells: int = 8,
                 window: Optional[tuple[float, float, float]] = None):
    """``int_R fn dmu~`` by the shared midpoint rule: subcells x subcells
    cells with exact ``x^{nu-1} dx du`` weights (additive under the exact
    children splitting, positive, and identical for predicate and verifier)."""
    xm, um, wx, wu = _midpoint_rule(nu, R, subcells, window)
    if xm.size == 0:
        return 0.0
    vals = np.asarray(fn(xm[None, :], um[:, None]))
    return float(np.einsum("u,x,ux->", wu, wx, vals))


@dataclasses.dataclass
class CZDecomposition:
    """Result of the stopping-time splitting ``f = g + sum b_R``."""

    nu: float
    lam: float
    kappa: float
    f_l1: float
    bad_sets: list[AdmissibleSet]
    bad_averages: list[float]
    roots: list[AdmissibleSet]
    subcells: int
    window: tuple[float, float, float]

    @property
    def n_bad(self) -> int:
        return len(self.bad_sets)

    def measure_bad_total(self) -> float:
        return sum(measure(self.nu, R) for R in self.bad_sets)

    def good_part(self, f: Callable) -> Callable:
        """Evaluator of g: the average on each bad set, f elsewhere."""
        sets = self.bad_sets
        avgs = self.bad_averages

        def g(x, u):
            x = np.asarray(x, dtype=float)
            u = np.asarray(u, dtype=float)
            out = np.array(np.broadcast_arrays(np.asarray(f(x, u)),
                                               x + 0.0 * u)[0], dtype=float, copy=True)
            for R, a in zip(sets, avgs):
                out = np.where(R.contains(x, u), a, out)
            return out

        return g

    def bad_part(self, f: Callable, R: AdmissibleSet, avg: float) -> Callable:
        def b(x, u):
            inside = R.contains(x, u)
            return np.where(inside, np.asarray(f(x, u)) - avg, 0.0)

        return b


def cz_decompose(nu: float, f: Callable, lam: float,
                 window: tuple[float, float, float], subcells: int = 8,
                 max_depth: int = 64) -> CZDecomposition:
    """Stopping-time decomposition of f at height lambda over the window.

    f is a callable (x, u) -> values, zero (or negligible) outside the
    window ``(x_hi, u_lo, u_hi)``.  Descends the quasi-partition whose root
    measures exceed ``kappa ||f||_1 / lambda``, stopping at the first set
    where the average of |f| reaches ``lambda/kappa`` (ties stop).  Branches
    whose sampled maximum is already below the threshold are certified good
    and not refined.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    kappa = max(27.0, 2.0 ** (nu + 1.0))

    def node_stats(R: AdmissibleSet):
        xm, um, wx, wu = _midpoint_rule(nu, R, subcells, window)
        if xm.size == 0:
            return 0.0, 0.0, 0.0
        vals = np.asarray(f(xm[None, :], um[:, None]), dtype=float)
        absv = np.abs(vals)
        int_abs = float(np.einsum("u,x,ux->", wu, wx, absv))
        int_signed = float(np.einsum("u,x,ux->", wu, wx, vals))
        return int_abs, int_signed, float(absv.max())

    roots = quasi_partition(nu, 1.0, window)  # provisional, for ||f||_1
    f_l1 = sum(node_stats(R)[0] for R in roots)
    if f_l1 <= 0:
        raise ValueError("f vanishes on the window")
    roots = quasi_partition(nu, kappa * f_l1 / lam, window)
    f_l1 = sum(node_stats(R)[0] for R in roots)
    threshold = lam / kappa

    bad_sets: list[AdmissibleSet] = []
    bad_averages: list[float] = []

    def descend(R: AdmissibleSet, depth: int) -> None:
        if depth > max_depth:
            raise DecompositionError(
                f"stopping-time descent exceeded depth {max_depth} at {R}")
        int_abs, int_signed, vmax = node_stats(R)
        mu = measure(nu, R)
        if int_abs / mu >= threshold:
            bad_sets.append(R)
            bad_averages.append(int_signed / mu)
            return
        if vmax < lam:
            # certified good: |f| stays below lam here, which is all the
            # good part needs; the gap between the stopping height lam/kappa
            # and this certificate keeps the descent depth bounded even
            # where |f| crosses the stopping level
            return
        for child in children(R)[0]:
            descend(child, depth + 1)

    for R in roots:
        descend(R, 0)
    return CZDecomposition(nu, lam, kappa, f_l1, bad_sets, bad_averages,
                           roots, subcells, window)


def cz_verify(nu: float, dec: CZDecomposition, f: Callable) -> dict:
    """Residuals of the five decomposition invariants (all should be <= 0
    up to quadrature roundoff; scaled to be comparable to 1):

    - ``pointwise``: max |f - (g + sum b_R)| over the shared sample points;
    - ``mean_zero``: max_R |int b_R| / (lam mu(R));
    - ``b_l1``: max_R (||b_R||_1 / (2 lam mu(R)) - 1), clipped at 0;
    - ``measure_sum``: (sum mu(R)) lam / (kappa ||f||_1) - 1, clipped at 0;
    - ``g_sup``: sup |g| / lam - 1 over samples, clipped at 0.
    """
    lam, kappa = dec.lam, dec.kappa
    pointwise = 0.0
    mean_zero = 0.0
    b_l1 = 0.0
    g_sup = 0.0

    for R, avg in zip(dec.bad_sets, dec.bad_averages):
        mu = measure(nu, R)
        xm, um, wx, wu = _midpoint_rule(nu, R, dec.subcells, dec.window)
        vals = (np.asarray(f(xm[None, :], um[:, None]), dtype=float)
                if xm.size else np.zeros((0, 0)))
        # the clipped-away part of R carries b_R = -avg
        clipped_mu = mu - (float(np.sum(wx) * np.sum(wu)) if xm.size else 0.0)
        int_b = float(np.einsum("u,x,ux->", wu, wx, vals - avg)) - avg * clipped_mu \
            if xm.size else -avg * mu
        mean_zero = max(mean_zero, abs(int_b) / (lam * mu))
        int_abs_b = (float(np.einsum("u,x,ux->", wu, wx, np.abs(vals - avg)))
                     if xm.size else 0.0) + abs(avg) * clipped_mu
        b_l1 = max(b_l1, int_abs_b / (2 * lam * mu) - 1.0)

    # pointwise reconstruction f = g + sum b_R and the g-bound, on every
    # root's sample grid and every bad set's sample grid
    batches = [(_midpoint_rule(nu, R, dec.subcells, dec.window)[:2])
               for R in dec.roots]
    batches += [(_midpoint_rule(nu, R, dec.subcells, dec.window)[:2])
                for R in dec.bad_sets]
    for xm, um in batches:
        if xm.size == 0:
            continue
        xg, ug = xm[None, :], um[:, None]
        fv = np.asarray(f(xg, ug), dtype=float)
        g_v = fv.copy()
        b_sum = np.zeros_like(fv)
        for R, avg in zip(dec.bad_sets, dec.bad_averages):
            mask = R.contains(xg, ug)
            if not mask.any():
                continue
            g_v = np.where(mask, avg, g_v)
            b_sum = b_sum + np.where(mask, fv - avg, 0.0)
        pointwise = max(pointwise, float(np.max(np.abs(fv - (g_v + b_sum)))) / lam)
        g_sup = max(g_sup, float(np.max(np.abs(g_v))) / lam - 1.0)

    measure_sum = dec.measure_bad_total() * lam / (kappa * dec.f_l1) - 1.0
    return {
        "pointwise": pointwise,
        "mean_zero": mean_zero,
        "b_l1": max(0.0, b_l1),
        "measure_sum": max(0.0, measure_sum),
        "g_sup": max(0.0, g_sup),
    }


def atom_check(nu: float, a: Callable, R: AdmissibleSet,
               subcells: int = 8) -> dict:
    """Residuals of the atom conditions for a supported on R:
    mean zero, L^2 bound ``||a||_2 <= mu(R)^{-1/2}``, and support containment
    (sampled on the enlargement box minus R)."""
    mu = measure(nu, R)
    mean = set_integral(nu, a, R, subcells)
    l2 = math.sqrt(max(set_integral(
        nu, lambda x, u: np.abs(np.asarray(a(x, u))) ** 2, R, subcells), 0.0))
    box = enlargement_box(R)
    xs = np.linspace(box[0], box[1], 4 * subcells)[None, :]
    us = np.linspace(box[2], box[3], 4 * subcells)[:, None]
    outside = ~R.contains(xs, us)
    leak = float(np.max(np.abs(np.asarray(a(xs, us)) * outside)))
    return {
        "mean": abs(mean) * math.sqrt(mu),  # scaled like the L^2 bound
        "l2_excess": max(0.0, l2 * math.sqrt(mu) - 1.0),
        "support_leak": leak,
    }
