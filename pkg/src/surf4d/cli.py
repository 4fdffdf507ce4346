"""Command line client for the surface analysis service.

By default every subcommand talks to an in-process copy of the HTTP app,
so no server has to be running; pass --server to use a remote one
instead.  Exit codes: 0 on success, 1 for usage or input errors (and for
a failed validation run), 2 when the computation hits a degeneracy.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys

import httpx

from .errors import SpecFileError
from .specfile import load_spec_file

CSV_HEADER = "u,v,E,F,G,L,M,N,k,kappa,K,class"


class _Parser(argparse.ArgumentParser):
    """argparse that exits with code 1 on bad usage instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    p = _Parser(prog="surf4d",
                description="invariants, frames and validation for "
                            "two-dimensional surfaces in four-space")
    p.add_argument("--server", metavar="URL", default=None,
                   help="base URL of a running service "
                        "(default: run the app in process)")
    sub = p.add_subparsers(dest="command", required=True)

    def add_source(sp):
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--input", metavar="FILE",
                         help="surface description file")
        src.add_argument("--fixture", metavar="NAME",
                         help="name of a built-in surface")
        sp.add_argument("--jets", choices=("analytic", "fd"),
                        default="analytic",
                        help="second-order jets: exact or finite-difference")
        sp.add_argument("--fd-step", type=float, default=None,
                        help="step for finite-difference jets")
        sp.add_argument("--tol", type=float, default=1e-9,
                        help="classification tolerance (default 1e-9)")

    sp = sub.add_parser("scan", help="invariant grid scan as CSV")
    add_source(sp)
    sp.add_argument("--nu", type=int, default=16, help="grid size in u")
    sp.add_argument("--nv", type=int, default=16, help="grid size in v")
    sp.add_argument("--out", metavar="FILE", default=None,
                    help="write CSV here instead of stdout")
    sp.add_argument("--json", action="store_true",
                    help="emit raw JSON instead of CSV")

    sp = sub.add_parser("info", help="full report for one parameter point")
    add_source(sp)
    sp.add_argument("--u", type=float, required=True)
    sp.add_argument("--v", type=float, required=True)
    sp.add_argument("--h-frame", type=float, default=1e-4,
                    help="step for frame-derivative stencils")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("validate", help="self-consistency check suite")
    add_source(sp)
    sp.add_argument("--nu", type=int, default=16)
    sp.add_argument("--nv", type=int, default=16)
    sp.add_argument("--h-frame", type=float, default=1e-4)
    sp.add_argument("--json", action="store_true")

    sub.add_parser("catalog", help="list built-in surfaces")
    return p


def _surface_payload(args) -> dict:
    payload: dict = {"jets": args.jets}
    if args.fd_step is not None:
        payload["fd_step"] = args.fd_step
    if args.fixture is not None:
        payload["fixture"] = args.fixture
    else:
        spec = load_spec_file(args.input)
        payload["chart"] = {
            "name": spec.name,
            "x1": spec.coords[0], "x2": spec.coords[1],
            "x3": spec.coords[2], "x4": spec.coords[3],
            "u_range": list(spec.u_range), "v_range": list(spec.v_range),
        }
    return payload


def _request(server: str | None, method: str, path: str,
             payload: dict | None = None) -> tuple[int, object]:
    if server is not None:
        with httpx.Client(base_url=server, timeout=300.0) as client:
            r = client.request(method, path, json=payload)
            return r.status_code, r.json()

    from .service import app

    async def run():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport,
                                     base_url="http://surf4d.internal",
                                     timeout=300.0) as client:
            r = await client.request(method, path, json=payload)
            return r.status_code, r.json()

    return asyncio.run(run())


def _report_error(status: int, body: object) -> int:
    if isinstance(body, dict):
        kind = body.get("error", f"http {status}")
        msg = body.get("message", json.dumps(body))
    else:
        kind, msg = f"http {status}", str(body)
    print(f"surf4d: error ({kind}): {msg}", file=sys.stderr)
    return 1 if status == 400 else 2


def _fmt(x: object) -> str:
    if x is None:
        return "nan"
    if isinstance(x, float):
        return "%.17g" % x
    return str(x)


def _cmd_scan(args) -> int:
    payload = _surface_payload(args)
    payload.update(nu=args.nu, nv=args.nv, tol=args.tol)
    status, body = _request(args.server, "POST", "/scan", payload)
    if status != 200:
        return _report_error(status, body)
    if args.json:
        text = json.dumps(body, indent=2) + "\n"
    else:
        lines = [CSV_HEADER]
        for row in body["rows"]:
            lines.append(",".join(
                _fmt(row[c]) for c in ("u", "v", "E", "F", "G", "L", "M",
                                       "N", "k", "kappa", "K", "class")))
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    hist = ", ".join(f"{k}={n}" for k, n in sorted(body["histogram"].items()))
    print(f"{body['chart']}: {body['nu']}x{body['nv']} grid, "
          f"classes: {hist or 'none'}", file=sys.stderr)
    return 0


def _vec(x) -> str:
    return "(" + ", ".join("%.12g" % c for c in x) + ")"


def _print_info(body: dict) -> None:
    print(f"chart {body['chart']} at (u, v) = "
          f"({body['u']:.12g}, {body['v']:.12g})")
    print(f"  position      {_vec(body['position'])}")
    m = body["metric"]
    print(f"  metric        E={m['E']:.12g} F={m['F']:.12g} "
          f"G={m['G']:.12g} W={m['W']:.12g}")
    w = body["weingarten"]
    print(f"  form          L={w['L']:.12g} M={w['M']:.12g} "
          f"N={w['N']:.12g}")
    inv = body["invariants"]
    print(f"  invariants    k={inv['k']:.12g} kappa={inv['kappa']:.12g} "
          f"K={inv['K']:.12g}")
    r1, r2 = body["characteristic_roots"]
    print(f"  class         {body['point_class']} "
          f"(roots {r1:.12g}, {r2:.12g})")
    H = body["mean_curvature"]
    print(f"  mean curv     {_vec(H['vector'])} |H|={H['norm']:.12g} "
          f"minimal={body['minimal']}")
    if body["principal"] is not None:
        pr = body["principal"]
        print(f"  principal x   {_vec(pr['x'])}")
        print(f"  principal y   {_vec(pr['y'])}")
    else:
        print(f"  principal     undefined: {body['principal_reason']}")
    if body["frenet"] is not None:
        f = body["frenet"]
        print(f"  frame x       {_vec(f['x'])}")
        print(f"  frame y       {_vec(f['y'])}")
        print(f"  frame b       {_vec(f['b'])}")
        print(f"  frame l       {_vec(f['l'])}")
        print(f"  coefficients  nu1={f['nu1']:.12g} nu2={f['nu2']:.12g} "
              f"lambda={f['lam']:.12g} mu={f['mu']:.12g}")
        print(f"                beta1={f['beta1']:.12g} "
              f"beta2={f['beta2']:.12g} gamma1={f['gamma1']:.12g} "
              f"gamma2={f['gamma2']:.12g}")
    else:
        print(f"  frame         undefined: {body['frenet_reason']}")
    if body["flat_analysis"] is not None:
        fa = body["flat_analysis"]
        print(f"  flat point    beta={fa['beta']:.12g} "
              f"K={fa['gauss_K']:.12g} verdict={fa['verdict']}")
    else:
        print(f"  flat point    n/a: {body['flat_reason']}")


def _cmd_info(args) -> int:
    payload = _surface_payload(args)
    payload.update(u=args.u, v=args.v, tol=args.tol, h_frame=args.h_frame)
    status, body = _request(args.server, "POST", "/info", payload)
    if status != 200:
        return _report_error(status, body)
    if args.json:
        print(json.dumps(body, indent=2))
    else:
        _print_info(body)
    return 0


def _cmd_validate(args) -> int:
    payload = _surface_payload(args)
    payload.update(nu=args.nu, nv=args.nv, tol=args.tol,
                   h_frame=args.h_frame)
    status, body = _request(args.server, "POST", "/validate", payload)
    if status != 200:
        return _report_error(status, body)
    if args.json:
        print(json.dumps(body, indent=2))
        return 0 if body["passed"] else 1
    print(f"validation of {body['chart']}")
    for c in body["checks"]:
        worst = "" if c["worst"] is None else f"worst {c['worst']:.3g}"
        print(f"  {c['status'].upper():4s}  {c['name']:28s} {worst:14s} "
              f"{c['detail']}")
    print("result: " + ("PASS" if body["passed"] else "FAIL"))
    return 0 if body["passed"] else 1


def _cmd_catalog(args) -> int:
    status, body = _request(args.server, "GET", "/catalog")
    if status != 200:
        return _report_error(status, body)
    for fx in body:
        (ul, uh), (vl, vh) = fx["domain"]
        print(f"{fx['name']:22s} u in [{ul:g}, {uh:g}], "
              f"v in [{vl:g}, {vh:g}]  {fx['description']}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "scan":
            return _cmd_scan(args)
        if args.command == "info":
            return _cmd_info(args)
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_catalog(args)
    except SpecFileError as exc:
        print(f"surf4d: error (SpecFileError): {exc}", file=sys.stderr)
        return 1
    except httpx.HTTPError as exc:
        print(f"surf4d: error (connection): {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
