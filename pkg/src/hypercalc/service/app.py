"""Service endpoints: profiles, decompositions, verification.

Error contract: malformed or out-of-domain arguments produce 4xx responses
(422 from model validation, 400 from domain checks), while numeric failures
inside a computation produce 500 with the failing error's name in the body.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from .. import __version__
from ..cz import DecompositionError, cz_decompose
from ..gnu_space import PlaneFunction
from ..heat import (bump_window, euclidean_heat_profile, heat_profile,
                    multiplier_profile)
from ..io import decomposition_report
from ..riesz import riesz_profile
from ..verify import SUITES, run_suite
from .schemas import (CzReport, CzRequest, ProfileRequest, ProfileResponse,
                      VerifyRequest, VerifyResponse)

app = FastAPI(title="hypercalc", version=__version__)


@app.exception_handler(ValueError)
async def _domain_error(request, exc: ValueError):
    return JSONResponse(status_code=400,
                        content={"error": type(exc).__name__,
                                 "detail": str(exc)})


@app.exception_handler(DecompositionError)
@app.exception_handler(ArithmeticError)
@app.exception_handler(RuntimeError)
async def _numeric_error(request, exc: Exception):
    return JSONResponse(status_code=500,
                        content={"error": type(exc).__name__,
                                 "detail": str(exc)})


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


def _parse_multiplier(spec: str):
    """Preset mini-language: ``gauss:t=1`` or ``bump:r0=2``."""
    name, _, rest = spec.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, _, val = item.partition("=")
        try:
            params[key.strip()] = float(val)
        except ValueError:
            raise HTTPException(400, f"bad multiplier parameter {item!r}")
    if name == "gauss":
        if set(params) != {"t"} or params["t"] <= 0:
            raise HTTPException(400, "gauss preset needs t=<positive>")
        return euclidean_heat_profile(params["t"])
    if name == "bump":
        if set(params) != {"r0"} or params["r0"] <= 0:
            raise HTTPException(400, "bump preset needs r0=<positive>")
        return bump_window(params["r0"])
    raise HTTPException(400, f"unknown multiplier preset {name!r}; "
                        "available: gauss:t=..., bump:r0=...")


@app.post("/profile", response_model=ProfileResponse)
def profile(req: ProfileRequest):
    if req.rmax <= req.rmin:
        raise HTTPException(400, "rmax must exceed rmin")
    if req.kind == "heat":
        if req.t is None:
            raise HTTPException(400, "heat profiles need --t")
        prof = heat_profile(req.nu, req.t)
    elif req.kind == "riesz":
        if req.rmin <= 0:
            raise HTTPException(400, "riesz profiles need rmin > 0 "
                                "(singular at the origin)")
        prof = riesz_profile(req.nu)
    else:
        if req.multiplier is None:
            raise HTTPException(400, "multiplier profiles need "
                                "--multiplier <preset>")
        prof = multiplier_profile(req.nu, _parse_multiplier(req.multiplier))
    r = np.linspace(req.rmin, req.rmax, req.n)
    h = np.asarray(prof(r), dtype=float)
    return ProfileResponse(kind=req.kind, nu=req.nu, r=r.tolist(),
                           H=h.tolist())


@app.post("/cz", response_model=CzReport)
def cz(req: CzRequest):
    try:
        f = PlaneFunction(np.asarray(req.plane.x), np.asarray(req.plane.u),
                          np.asarray(req.plane.values))
    except ValueError as exc:
        raise HTTPException(400, f"bad plane payload: {exc}")
    window = (float(f.x_grid[-1]), float(f.u_grid[0]), float(f.u_grid[-1]))
    dec = cz_decompose(req.nu, f, req.lam, window, subcells=req.subcells)
    return CzReport.model_validate(decomposition_report(req.nu, dec, f))


@app.post("/verify", response_model=VerifyResponse)
def verify(req: VerifyRequest):
    if req.suite != "all" and req.suite not in SUITES:
        raise HTTPException(400, f"unknown suite {req.suite!r}; choose "
                            f"from {('all',) + SUITES}")
    report = run_suite(req.suite, seed=req.seed)
    return VerifyResponse(suite=report.suite, passed=report.passed,
                          checks=[c.as_dict() for c in report.checks])
