"""Command-line interface: a thin client over the in-process service.

Subcommands post to the FastAPI app through the test client (no network),
then write files themselves — CSV for numeric arrays, JSON for reports, all
atomically.  Exit codes: 0 success, 1 verification failure, 2 usage error,
3 numeric failure.  HYPERCALC_THREADS caps BLAS/OpenMP parallelism; outputs
are byte-identical for identical arguments and seed.
"""

from __future__ import annotations

import argparse
import os
import sys

USAGE_ERROR = 2
NUMERIC_ERROR = 3


def _apply_thread_cap() -> None:
    raw = os.environ.get("HYPERCALC_THREADS")
    if not raw:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(var, raw)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypercalc",
        description="Profiles, decompositions, and verification batteries "
        "for the half-line hypergroup calculus.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="evaluate a radial profile to CSV")
    p.add_argument("--kind", required=True,
                   choices=["heat", "riesz", "multiplier"])
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--t", type=float, default=None,
                   help="time parameter (heat kernels)")
    p.add_argument("--rmin", type=float, required=True)
    p.add_argument("--rmax", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--multiplier", default=None, metavar="SPEC",
                   help="preset: gauss:t=1 or bump:r0=2")

    c = sub.add_parser("cz", help="good/bad decomposition of a plane CSV")
    c.add_argument("--nu", type=float, required=True)
    c.add_argument("--lambda", dest="lam", type=float, required=True)
    c.add_argument("--in", dest="infile", required=True,
                   help="input x,u,value CSV")
    c.add_argument("--out", required=True, help="output JSON report")
    c.add_argument("--subcells", type=int, default=8)
    c.add_argument("--no-self-audit", action="store_true",
                   help="skip re-verifying the decomposition invariants")

    v = sub.add_parser("verify", help="run a verification battery")
    v.add_argument("--suite", required=True,
                   choices=["all", "hankel", "dunkl", "gnu", "cz", "heat",
                            "riesz"])
    v.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("serve", help="run the HTTP service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    return parser


def _client():
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service.app import app
    return TestClient(app)


def _report_failure(resp) -> int:
    """Map an error response to an exit code, echoing the server detail."""
    try:
        body = resp.json()
    except ValueError:
        body = {"detail": resp.text}
    name = body.get("error", "")
    detail = body.get("detail", body)
    prefix = f"{name}: " if name else ""
    print(f"error: {prefix}{detail}", file=sys.stderr)
    return NUMERIC_ERROR if resp.status_code >= 500 else USAGE_ERROR


def _cmd_profile(args) -> int:
    if args.kind == "heat" and args.t is None:
        print("error: --kind heat requires --t", file=sys.stderr)
        return USAGE_ERROR
    if args.kind == "multiplier" and args.multiplier is None:
        print("error: --kind multiplier requires --multiplier SPEC",
              file=sys.stderr)
        return USAGE_ERROR
    resp = _client().post("/profile", json={
        "kind": args.kind, "nu": args.nu, "t": args.t, "rmin": args.rmin,
        "rmax": args.rmax, "n": args.n, "multiplier": args.multiplier})
    if resp.status_code != 200:
        return _report_failure(resp)
    from .io import write_profile_csv
    body = resp.json()
    write_profile_csv(args.out, body["r"], body["H"])
    return 0


def _cmd_cz(args) -> int:
    from .io import read_plane_csv, write_json_report
    try:
        plane = read_plane_csv(args.infile)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    resp = _client().post("/cz", json={
        "nu": args.nu, "lambda": args.lam, "subcells": args.subcells,
        "plane": {"x": plane.x_grid.tolist(), "u": plane.u_grid.tolist(),
                  "values": plane.values.tolist()}})
    if resp.status_code != 200:
        return _report_failure(resp)
    report = resp.json()
    if not args.no_self_audit:
        bad = {k: v for k, v in report["residuals"].items() if v > 1e-6}
        if bad:
            print(f"error: decomposition invariants violated: {bad}",
                  file=sys.stderr)
            return NUMERIC_ERROR
    write_json_report(args.out, report)
    return 0


def _cmd_verify(args) -> int:
    resp = _client().post("/verify", json={"suite": args.suite,
                                           "seed": args.seed})
    if resp.status_code != 200:
        return _report_failure(resp)
    body = resp.json()
    rows = body["checks"]
    id_w = max([len(r["id"]) for r in rows] + [5])
    print(f"{'check':<{id_w}}  {'measured':>13} {'expected':>13} "
          f"{'tolerance':>10}  status")
    for r in rows:
        print(f"{r['id']:<{id_w}}  {r['measured']:>13.6g} "
              f"{r['expected']:>13.6g} {r['tolerance']:>10.1e}  "
              f"{r['status']}")
    n_pass = sum(r["status"] == "pass" for r in rows)
    print(f"suite {body['suite']}: {n_pass}/{len(rows)} checks passed")
    return 0 if body["passed"] else 1


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    _apply_thread_cap()
    args = _build_parser().parse_args(argv)
    handler = {"profile": _cmd_profile, "cz": _cmd_cz,
               "verify": _cmd_verify, "serve": _cmd_serve}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
