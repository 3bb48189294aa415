"""CSV and JSON serialization for profiles, kernels, and reports.

All writers are atomic (temp file in the target directory, then rename) and
emit shortest round-trip decimal for every float, so identical inputs produce
byte-identical files and every file re-reads to the exact same doubles.

Formats:

- radial data: ``x,value`` (real) or ``x,re,im`` (complex), header mandatory;
- profiles: ``r,H``;
- plane kernels: ``x,u,value``, row-major in u then x;
- symbol matrices: ``u,v,re,im`` with the frequency recorded in a leading
  ``# xi=...`` header line;
- decomposition reports: JSON with sorted keys.
"""

from __future__ import annotations

import json
import os
import tempfile
from typing import Callable

import numpy as np

from .cz import CZDecomposition, cz_verify, measure, set_integral
from .gnu_space import PlaneFunction

__all__ = [
    "write_radial_csv",
    "read_radial_csv",
    "write_profile_csv",
    "read_profile_csv",
    "write_plane_csv",
    "read_plane_csv",
    "write_symbol_csv",
    "read_symbol_csv",
    "write_json_report",
    "read_json_report",
    "decomposition_report",
]


def _atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v: float) -> str:
    return repr(float(v))


def write_radial_csv(path: str, x, values) -> None:
    """Write radial samples as ``x,value`` or, for complex data,
    ``x,re,im``."""
    x = np.asarray(x, dtype=float)
    values = np.asarray(values)
    if x.shape != values.shape:
        raise ValueError("x and values must have the same shape")
    lines = []
    if np.iscomplexobj(values):
        lines.append("x,re,im")
        for xi, vi in zip(x, values):
            lines.append(f"{_fmt(xi)},{_fmt(vi.real)},{_fmt(vi.imag)}")
    else:
        lines.append("x,value")
        for xi, vi in zip(x, values):
            lines.append(f"{_fmt(xi)},{_fmt(vi)}")
    _atomic_write_text(path, "\n".join(lines) + "\n")


def read_radial_csv(path: str) -> tuple:
    with open(path) as fh:
        header = fh.readline().strip()
        rows = [line.strip().split(",") for line in fh if line.strip()]
    if header == "x,value":
        x = np.array([float(r[0]) for r in rows])
        vals = np.array([float(r[1]) for r in rows])
    elif header == "x,re,im":
        x = np.array([float(r[0]) for r in rows])
        vals = np.array([complex(float(r[1]), float(r[2])) for r in rows])
    else:
        raise ValueError(f"unrecognized radial CSV header {header!r}")
    return x, vals


def write_profile_csv(path: str, r, h) -> None:
    """Write a radial profile as ``r,H`` rows."""
    r = np.asarray(r, dtype=float)
    h = np.asarray(h, dtype=float)
    if r.shape != h.shape:
        raise ValueError("r and H must have the same shape")
    lines = ["r,H"]
    for ri, hi in zip(r, h):
        lines.append(f"{_fmt(ri)},{_fmt(hi)}")
    _atomic_write_text(path, "\n".join(lines) + "\n")


def read_profile_csv(path: str) -> tuple:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "r,H":
            raise ValueError(f"unrecognized profile CSV header {header!r}")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    r = np.array([float(row[0]) for row in rows])
    h = np.array([float(row[1]) for row in rows])
    return r, h


def write_plane_csv(path: str, f: PlaneFunction) -> None:
    """Write plane samples as ``x,u,value`` rows, row-major in u then x."""
    lines = ["x,u,value"]
    for iu, u in enumerate(f.u_grid):
        for ix, x in enumerate(f.x_grid):
            lines.append(f"{_fmt(x)},{_fmt(u)},{_fmt(f.values[iu, ix])}")
    _atomic_write_text(path, "\n".join(lines) + "\n")


def read_plane_csv(path: str) -> PlaneFunction:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "x,u,value":
            raise ValueError(f"unrecognized plane CSV header {header!r}")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    x = np.array([float(r[0]) for r in rows])
    u = np.array([float(r[1]) for r in rows])
    vals = np.array([float(r[2]) for r in rows])
    x_grid = np.unique(x)
    u_grid = np.unique(u)
    if x.size != x_grid.size * u_grid.size:
        raise ValueError("plane CSV rows do not form a full tensor grid")
    values = vals.reshape(u_grid.size, x_grid.size)
    # verify the declared row-major (u, then x) layout
    if not (np.allclose(x.reshape(u_grid.size, -1), x_grid[None, :])
            and np.allclose(u.reshape(-1, x_grid.size), u_grid[:, None])):
        raise ValueError("plane CSV rows are not in row-major u-then-x order")
    return PlaneFunction(x_grid, u_grid, values)


def write_symbol_csv(path: str, xi: float, u, v, B) -> None:
    """Write a symbol matrix as ``u,v,re,im`` rows under a ``# xi=`` line."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    B = np.asarray(B)
    if B.shape != (u.size, v.size):
        raise ValueError("B must have shape (len(u), len(v))")
    lines = [f"# xi={_fmt(xi)}", "u,v,re,im"]
    Bc = B.astype(complex)
    for i, ui in enumerate(u):
        for j, vj in enumerate(v):
            lines.append(f"{_fmt(ui)},{_fmt(vj)},"
                         f"{_fmt(Bc[i, j].real)},{_fmt(Bc[i, j].imag)}")
    _atomic_write_text(path, "\n".join(lines) + "\n")


def read_symbol_csv(path: str) -> tuple:
    with open(path) as fh:
        first = fh.readline().strip()
        if not first.startswith("# xi="):
            raise ValueError("symbol CSV must start with a '# xi=' line")
        xi = float(first[len("# xi="):])
        header = fh.readline().strip()
        if header != "u,v,re,im":
            raise ValueError(f"unrecognized symbol CSV header {header!r}")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    u = np.unique([float(r[0]) for r in rows])
    v = np.unique([float(r[1]) for r in rows])
    B = np.empty((u.size, v.size), dtype=complex)
    for r in rows:
        i = int(np.searchsorted(u, float(r[0])))
        j = int(np.searchsorted(v, float(r[1])))
        B[i, j] = complex(float(r[2]), float(r[3]))
    return xi, u, v, B


def write_json_report(path: str, obj) -> None:
    _atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json_report(path: str):
    with open(path) as fh:
        return json.load(fh)


def decomposition_report(nu: float, dec: CZDecomposition,
                         f: Callable) -> dict:
    """JSON-ready summary of a good/bad splitting: threshold, geometry
    constant, set count, the L^1 masses of the two parts, and the five
    invariant residuals."""
    l1_bad = 0.0
    l1_f_on_bad = 0.0
    l1_avg = 0.0
    for R, avg in zip(dec.bad_sets, dec.bad_averages):
        mu = measure(nu, R)
        mu_in = set_integral(nu, lambda x, u: np.ones_like(np.asarray(x)
                                                          * np.asarray(u)),
                             R, dec.subcells, dec.window)
        int_abs = set_integral(
            nu, lambda x, u: np.abs(np.asarray(f(x, u)) - avg),
            R, dec.subcells, dec.window)
        # the part of R clipped off by the window carries b = -avg
        l1_bad += int_abs + abs(avg) * max(mu - mu_in, 0.0)
        l1_f_on_bad += set_integral(
            nu, lambda x, u: np.abs(np.asarray(f(x, u))),
            R, dec.subcells, dec.window)
        l1_avg += abs(avg) * mu
    return {
        "lambda": dec.lam,
        "kappa": dec.kappa,
        "n_bad": dec.n_bad,
        "l1_good": dec.f_l1 - l1_f_on_bad + l1_avg,
        "l1_bad_total": l1_bad,
        "measure_bad_total": dec.measure_bad_total(),
        "residuals": cz_verify(nu, dec, f),
        "bad_sets": [R.as_dict() for R in dec.bad_sets],
    }
