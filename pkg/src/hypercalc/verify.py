"""Self-contained verification batteries behind the ``verify`` command.

Each suite re-runs a handful of the package's defining identities with fresh
quadrature and reports one row per check.  A check passes when
``|measured - expected|`` is within the declared tolerance, taken relative
when the check says so and absolute otherwise; bound-style invariants are
normalized so that ``measured`` is the (clipped) excess over the bound and
``expected`` is zero.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable

import numpy as np

from . import cz as czmod
from . import heat as heatmod
from . import riesz as rieszmod
from ._grids import loglinear_grid
from .cz import AdmissibleSet
from .dunkl import (LineFunction, dunkl_convolve, dunkl_derivative,
                    dunkl_transform)
from .gnu_space import distance, group_norm, haar_integral, involution, star
from .hankel import (RadialFunction, hankel_convolve, hankel_transform,
                     radial_integral)
from .specfun import NuParam, eval_dunkl_kernel

__all__ = ["Check", "VerifyReport", "SUITES", "run_suite",
           "plancherel_ratio"]

SUITES = ("hankel", "dunkl", "gnu", "cz", "heat", "riesz")


@dataclasses.dataclass
class Check:
    id: str
    description: str
    measured: float
    expected: float
    tolerance: float
    status: str

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclasses.dataclass
class VerifyReport:
    suite: str
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.status == "pass" for c in self.checks)

    def as_dict(self) -> dict:
        return {"suite": self.suite,
                "checks": [c.as_dict() for c in self.checks]}


def _check(cid: str, desc: str, measured: float, expected: float,
           tol: float, mode: str = "abs") -> Check:
    err = abs(measured - expected)
    bound = tol * abs(expected) if mode == "rel" else tol
    return Check(cid, desc, float(measured), float(expected), float(tol),
                 "pass" if err <= bound else "fail")


def plancherel_ratio(nu: float, fn: Callable, x_max: float = 14.0,
                     n: int = 257, xi_max: float = 30.0,
                     n_xi: int = 601) -> float:
    """L^2 norm ratio of the transform to the input, by quadrature."""
    f = RadialFunction.from_closed_form(fn, x_max, n)
    xi_grid = np.linspace(0.0, xi_max, n_xi)
    Hf = hankel_transform(nu, f, xi_grid)
    lhs = math.sqrt(radial_integral(
        nu, RadialFunction(xi_grid, np.abs(Hf) ** 2)))
    rhs = math.sqrt(radial_integral(
        nu, RadialFunction(f.grid, np.abs(f(f.grid)) ** 2,
                           closed_form=lambda x: np.abs(fn(x)) ** 2)))
    return lhs / rhs


def _suite_hankel(seed: int) -> list:
    checks = []
    for nu in (1.5, 2.0):
        ratio = plancherel_ratio(
            nu, lambda x: np.exp(-0.7 * np.asarray(x) ** 2)
            * (1.0 + np.asarray(x) ** 2) ** -1.0)
        checks.append(_check(
            f"plancherel-nu{nu}", "transform norm ratio equals "
            "2^(nu/2-1) Gamma(nu/2)", ratio, NuParam(nu).plancherel_const,
            1e-5, "rel"))

    # transform of the unit gaussian is the constant times itself
    nu = 2.0
    f = RadialFunction.from_closed_form(
        lambda x: np.exp(-np.asarray(x) ** 2 / 2), 14.0, 257)
    xi = np.array([0.4, 1.1, 2.3])
    got = hankel_transform(nu, f, xi)
    want = NuParam(nu).plancherel_const * np.exp(-xi ** 2 / 2)
    checks.append(_check(
        "gaussian-eigenfunction", "gaussian maps to gaussian with the "
        "Plancherel constant", float(np.max(np.abs(got - want))), 0.0, 1e-9))

    # convolution mass: ||f * g||_1 = ||f||_1 ||g||_1 for nonnegative input
    g = hankel_convolve(nu, f, f)
    lhs = radial_integral(nu, g)
    rhs = radial_integral(nu, f) ** 2
    checks.append(_check(
        "convolution-mass", "L1 mass is multiplicative under convolution",
        lhs, rhs, 1e-6, "rel"))
    return checks


def _suite_dunkl(seed: int) -> list:
    checks = []
    x = np.linspace(-6.0, 6.0, 31)
    got = eval_dunkl_kernel(1.0, x)
    checks.append(_check(
        "order-one-kernel", "rank-one kernel at nu=1 is exp(ix)",
        float(np.max(np.abs(got - np.exp(1j * x)))), 0.0, 1e-12))

    nu = 1.5
    f = LineFunction.from_closed_form(
        lambda x: np.exp(-(np.asarray(x) - 0.3) ** 2), 16.0, 301)
    Df = dunkl_derivative(nu, f)
    xi = np.array([-1.5, 0.4, 2.0])
    lhs = dunkl_transform(nu, Df, xi)
    rhs = 1j * xi * dunkl_transform(nu, f, xi)
    checks.append(_check(
        "intertwining", "derivative transforms to multiplication by i xi",
        float(np.max(np.abs(lhs - rhs))), 0.0, 1e-5))

    fe = LineFunction.from_closed_form(
        lambda x: np.exp(-np.asarray(x) ** 2 / 2), 10.0, 201)
    fr = RadialFunction.from_closed_form(
        lambda x: np.exp(-np.asarray(x) ** 2 / 2), 10.0, 101)
    dd = dunkl_convolve(nu, fe, fe)
    hh = hankel_convolve(nu, fr, fr)
    xs = np.array([0.0, 0.8, 1.9])
    checks.append(_check(
        "even-convolution", "even inputs convolve identically on the "
        "half-line", float(np.max(np.abs(dd(xs) - hh(xs)))), 0.0, 1e-8))
    return checks


def _suite_gnu(seed: int) -> list:
    checks = []
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 5.0, 25)
    u = rng.uniform(-3.0, 3.0, 25)
    res = np.cosh(group_norm(x, u)) - (np.cosh(u) + x ** 2 * np.exp(-u) / 2)
    checks.append(_check(
        "norm-identity", "cosh of the group norm matches its closed form",
        float(np.max(np.abs(res))), 0.0, 1e-10))

    xs, us = involution(*involution(x, u))
    checks.append(_check(
        "involution-period", "group inverse applied twice is the identity",
        float(max(np.max(np.abs(xs - x)), np.max(np.abs(us - u)))),
        0.0, 1e-12))

    # distance symmetry on random pairs
    p = rng.uniform(0.0, 4.0, (8, 2)) * [1.0, 1.0] + [0.1, -2.0]
    worst = 0.0
    for i in range(p.shape[0] - 1):
        a, b = (p[i, 0], p[i, 1]), (p[i + 1, 0], p[i + 1, 1])
        worst = max(worst, abs(distance(a, b) - distance(b, a)))
    checks.append(_check(
        "distance-symmetry", "left-invariant distance is symmetric",
        worst, 0.0, 1e-12))

    # the involution isometry: integral of f* equals integral of f
    K = heatmod.heat_kernel_gnu(2.0, 1.0)
    mass = haar_integral(2.0, K)
    mass_star = haar_integral(2.0, star(2.0, K))
    checks.append(_check(
        "star-isometry", "involution preserves the L1 integral",
        mass_star, mass, 1e-6, "rel"))
    return checks


def _random_admissible(rng: np.random.Generator) -> AdmissibleSet:
    u = float(rng.uniform(-3.0, 3.0))
    r = float(rng.uniform(0.05, 2.0))
    lo = czmod._level_for(u, r)
    hi_target = math.exp(u) * math.sinh(9 * r)
    hi = math.floor(math.log2(hi_target)) + 1
    while math.ldexp(1.0, hi - 1) >= hi_target:
        hi -= 1
    l = int(rng.integers(lo, hi + 1))
    m = int(rng.integers(0, 100))
    return AdmissibleSet(m, l, u, r)


def _suite_cz(seed: int) -> list:
    checks = []
    rng = np.random.default_rng(seed)
    sets = [_random_admissible(rng) for _ in range(40)]

    worst = 0.0
    for R in sets:
        xs = np.linspace(R.x_lo, R.x_hi, 7, endpoint=False)
        us = np.linspace(R.u_lo, R.u_hi, 7, endpoint=False)
        c = R.center
        far = max(distance(c, (x, u)) for x in xs for u in us)
        worst = max(worst, far / (27.0 * R.r))
    checks.append(_check(
        "containment", "sets lie within 27r of their centers "
        "(sampled, as a fraction of the bound)", max(worst - 1.0, 0.0),
        0.0, 0.0))

    nu = 2.0
    worst = 0.0
    for R in sets[:12]:
        mu = czmod.measure(nu, R)
        mu_star = czmod.measure_enlarged(nu, R, n_u=24, bisect_steps=40)
        worst = max(worst, mu_star / (2.0 ** (nu + 1.0) * mu))
    checks.append(_check(
        "doubling", "enlargement measure stays within 2^(nu+1) of the set "
        "(excess over the bound)", max(worst - 1.0, 0.0), 0.0, 1e-9))

    worst = 0.0
    for R in sets[:12]:
        kids, _ = czmod.children(R)
        total = sum(czmod.measure(nu, k) for k in kids)
        worst = max(worst, abs(total / czmod.measure(nu, R) - 1.0))
    checks.append(_check(
        "children-partition", "children measures sum to the parent",
        worst, 0.0, 1e-10))

    # one seeded decomposition, all five invariants
    amp = 1.0 + rng.uniform(0.0, 1.0)
    ctr = rng.uniform(1.0, 3.0)

    def f(x, u):
        x, u = np.asarray(x), np.asarray(u)
        return amp * np.exp(-0.7 * (x - ctr) ** 2 - u ** 2) \
            * (1.0 + 0.3 * np.sin(2.0 * x + u))

    dec = czmod.cz_decompose(nu, f, 0.08, (8.0, -2.5, 2.5))
    residuals = czmod.cz_verify(nu, dec, f)
    checks.append(_check(
        "decomposition-invariants", "reconstruction, mean-zero, L1, "
        "measure, and sup bounds all hold", max(residuals.values()),
        0.0, 1e-6))
    return checks


def _suite_heat(seed: int) -> list:
    checks = []
    K = heatmod.heat_kernel_gnu(2.0, 1.0)
    checks.append(_check(
        "unit-mass", "heat kernel integrates to one", haar_integral(2.0, K),
        1.0, 1e-4, "rel"))
    checks.append(_check(
        "positivity", "heat kernel is nonnegative on its grid "
        "(clipped minimum)", min(float(np.min(K.values)), 0.0), 0.0, 0.0))

    r = np.linspace(0.1, 4.0, 12)
    closed = heatmod.heat_profile(2.0, 1.0, method="closed")(r)
    psi = heatmod.heat_profile(2.0, 1.0, method="psi")(r)
    checks.append(_check(
        "weight-quadrature", "oscillatory-weight route matches the closed "
        "form", float(np.max(np.abs(psi / closed - 1.0))), 0.0, 1e-3))

    prof = heatmod.multiplier_profile(2.0, heatmod.bump_window(2.0))
    tail = np.abs(prof(np.linspace(2.05, 3.5, 10)))
    checks.append(_check(
        "finite-propagation", "compact multiplier support truncates the "
        "kernel at matching radius", float(np.max(tail)), 0.0, 1e-6))
    return checks


def _suite_riesz(seed: int) -> list:
    checks = []
    got = rieszmod.riesz_profile(2.0)(1.0)
    checks.append(_check(
        "closed-form", "inverse square root profile at unit radius",
        got, 1.0 / (math.pi * math.sinh(1.0)), 1e-10, "rel"))

    rng = np.random.default_rng(seed)
    ks = rieszmod.riesz_kernels(2.0)
    x = rng.uniform(0.05, 4.0, 20)
    u = rng.uniform(-3.0, 3.0, 20)
    res = np.abs(np.asarray(ks.k0_star(x, u)) - np.exp(-2.0 * u)
                 * np.asarray(ks.k0(np.exp(-u) * x, -u)))
    scale = np.max(np.abs(np.asarray(ks.k0_star(x, u))))
    checks.append(_check(
        "adjoint-involution", "adjoint kernel is the modular twist of the "
        "kernel", float(np.max(res) / scale), 0.0, 1e-11))

    checks.append(_check(
        "window-transform", "half-line transform of the rational window "
        "at unit frequency", rieszmod.aux_transforms(2.0, 1.0)[1],
        0.42102443824070833, 1e-10, "rel"))

    nu, r = 2.5, 1e-3
    const = rieszmod.riesz_asymptotic_constant(nu, 0, "zero")
    checks.append(_check(
        "small-radius-constant", "fractional profile follows the flat "
        "power law near zero", rieszmod.riesz_profile(nu)(r) * r ** nu,
        const, 1e-2, "rel"))
    return checks


_RUNNERS = {"hankel": _suite_hankel, "dunkl": _suite_dunkl,
            "gnu": _suite_gnu, "cz": _suite_cz, "heat": _suite_heat,
            "riesz": _suite_riesz}


def run_suite(suite: str, seed: int = 0) -> VerifyReport:
    """Run one named battery (or ``all``) and return its report."""
    if suite == "all":
        checks = []
        for name in SUITES:
            for c in _RUNNERS[name](seed):
                c.id = f"{name}.{c.id}"
                checks.append(c)
        return VerifyReport("all", checks)
    if suite not in _RUNNERS:
        raise ValueError(
            f"unknown suite {suite!r}; choose from {('all',) + SUITES}")
    return VerifyReport(suite, _RUNNERS[suite](seed))
