"""Command line interface: ``hessloci <command> [options] POLY``.

Exit codes: 0 success, 2 parse or usage error, 3 precondition violated,
4 resource limits exhausted, 1 failed regression checks.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import __version__
from .apolar import SmoothnessUndecided, build_apolar_ring, is_smooth, singular_points
from .fields import QQ
from .groebner import Limits, LimitsExceeded
from .hessian import HessianData, parse_field_spec, stratum_dimension
from .linalg import ProjPoint
from .poly import ParseError, parse_poly
from .regression import REGISTRY, run_checks
from .triangles import find_triangles_through, gamma_singularity_check, is_triangle, triangle_invariants
from .ts import PreconditionError, TS, detect_ts, verify_split

ENV_PREFIX = "HESSLOCI_"

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_PRECONDITION, EXIT_LIMITS = 0, 1, 2, 3, 4

REPORT_SCHEMA = {
    "type": "object",
    "required": ["tool", "version", "command", "input", "field", "seed", "limits", "result", "timing_ms"],
    "properties": {
        "tool": {"const": "hessloci"},
        "version": {"type": "string"},
        "command": {"enum": ["hessian", "smooth", "apolar", "strata", "ts", "triangles", "paper-verify"]},
        "input": {"type": ["string", "null"]},
        "field": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
        "limits": {
            "type": "object",
            "required": ["max_pairs", "max_poly_len"],
            "properties": {"max_pairs": {"type": "integer"}, "max_poly_len": {"type": "integer"}},
        },
        "result": {"type": "object"},
        "timing_ms": {"type": "number", "minimum": 0},
        "error": {"type": "object"},
    },
    "additionalProperties": False,
}


class UsageError(Exception):
    pass


def _env(name, default):
    return os.environ.get(ENV_PREFIX + name, default)


def _env_flag(name):
    return _env(name, "").lower() in ("1", "true", "yes", "on")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", default=_env("FIELD", None),
                        help="q, fp:<prime> or fp:auto (two random 31-bit primes)")
    common.add_argument("--seed", type=int, default=int(_env("SEED", "0")))
    common.add_argument("--max-pairs", type=int, default=int(_env("MAX_PAIRS", "200000")))
    common.add_argument("--max-poly-len", type=int, default=int(_env("MAX_POLY_LEN", "200000")))
    common.add_argument("--samples", type=int, default=int(_env("SAMPLES", "100")))
    common.add_argument("--json", action="store_true", default=_env_flag("JSON"),
                        help="machine-readable report on stdout")
    common.add_argument("--nvars", type=int, default=None, help="number of variables (default: inferred)")

    p = argparse.ArgumentParser(prog="hessloci", description="Hessian loci and apolarity of cubic forms")
    p.add_argument("--version", action="version", version=f"hessloci {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def poly_cmd(name, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("poly", help="polynomial text, or - to read stdin")
        return sp

    sp = poly_cmd("hessian", "Hessian matrix and determinant")
    sp.add_argument("--point", help="comma separated coordinates: also report rank and kernel there")
    sp = poly_cmd("smooth", "smoothness test")
    sp.add_argument("--backend", choices=["jacobian", "apolar", "both"], default="jacobian")
    poly_cmd("apolar", "apolar ring of a cubic")
    sp = poly_cmd("strata", "dimensions of the rank strata D_k")
    sp.add_argument("--k", type=int, action="append", help="stratum index (repeatable; default all)")
    poly_cmd("ts", "direct sum (Thom-Sebastiani) detection for smooth cubics")
    sp = poly_cmd("triangles", "triangles through a point of D_{n-1}")
    sp.add_argument("--point", required=True, help="comma separated coordinates of the first vertex")
    sp = sub.add_parser("paper-verify", parents=[common], help="regression suite of worked examples")
    sp.add_argument("selector", nargs="?", default="all", help="'all' or one of: " + ", ".join(REGISTRY))
    return p


def _read_poly(args, field):
    text = sys.stdin.read() if args.poly == "-" else args.poly
    text = text.strip()
    return text, parse_poly(text, args.nvars, field)


def _parse_point(text, field, nvars):
    try:
        coords = [field(c) for c in text.split(",")]
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise UsageError(f"bad point {text!r}: {exc}") from None
    if len(coords) != nvars:
        raise UsageError(f"point has {len(coords)} coordinates, expected {nvars}")
    try:
        return ProjPoint(field, coords)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _s(c):
    return str(c)


def _working_field(args, default="q"):
    spec = args.field or default
    try:
        fields = parse_field_spec(spec, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return spec, fields


def cmd_hessian(args, limits):
    spec, fields = _working_field(args)
    text, f = _read_poly(args, fields[0])
    hd = HessianData(f)
    res = {
        "nvars": f.nvars,
        "degree": f.degree(),
        "matrix": [[str(hd.H[i, j]) for j in range(f.nvars)] for i in range(f.nvars)],
        "h": str(hd.h),
        "h_degree": hd.h.degree(),
    }
    if args.point:
        P = _parse_point(args.point, fields[0], f.nvars)
        res["point"] = str(P)
        res["rank"] = hd.rank_at(P)
        res["kernel"] = [[_s(c) for c in v] for v in hd.iota(P)]
    return text, spec, res


def cmd_smooth(args, limits):
    spec, fields = _working_field(args)
    text, f = _read_poly(args, fields[0])
    backends = ["jacobian", "apolar"] if args.backend == "both" else [args.backend]
    verdicts = {}
    for b in backends:
        if b == "apolar" and f.degree() != 3:
            raise PreconditionError("the apolar backend handles cubics only")
        verdicts[b] = is_smooth(f, backend=b, limits=limits, seed=args.seed)
    smooth = verdicts[backends[0]]
    res = {"smooth": smooth, "backends": verdicts, "agree": len(set(verdicts.values())) == 1}
    if not smooth:
        pts, info = singular_points(f, seed=args.seed, limits=limits)
        res["singular_points"] = [str(P) for P in pts]
        res["singular_locus"] = info
    return text, spec, res


def cmd_apolar(args, limits):
    spec, fields = _working_field(args)
    text, f = _read_poly(args, fields[0])
    if f.degree() != 3:
        raise PreconditionError("apolar ring tables need a cubic")
    try:
        R = build_apolar_ring(f)
    except ValueError as exc:
        raise PreconditionError(str(exc)) from None
    N = R.n + 1
    res = {
        "dims": list(R.dims),
        "basisA2": ["*".join(f"y{i}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(e) if a) for e in R.basisA2],
        "mult": {f"{i},{j}": [_s(c) for c in R.mult11[i][j]] for i in range(N) for j in range(i, N)},
        "pairing_matrix": [[_s(c) for c in row] for row in R.pairing_matrix()],
        "gorenstein_nondegenerate": R.is_gorenstein_nondegenerate(),
    }
    return text, spec, res


def cmd_strata(args, limits):
    spec = args.field
    text, f = _read_poly(args, QQ)
    hd = HessianData(f)
    if spec is None:
        spec = "q" if hd.n <= 3 else "fp:auto"
    try:
        parse_field_spec(spec, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ks = args.k or list(range(hd.n + 1))
    for k in ks:
        if not 0 <= k <= hd.n:
            raise UsageError(f"k must lie in [0, {hd.n}]")
    reports = []
    for k in ks:
        rep = stratum_dimension(hd, k, spec, limits, seed=args.seed)
        if rep.limits_hit:
            raise LimitsExceeded(f"stratum D_{k} hit limits", {"k": k})
        d = rep.to_json()
        d["bound_ok"] = rep.bound_ok()
        reports.append(d)
    return text, spec, {"strata": reports}


def cmd_ts(args, limits):
    spec, fields = _working_field(args)
    text, f = _read_poly(args, fields[0])
    cert = detect_ts(f, seed=args.seed)
    res = cert.to_json()
    if cert.verdict == TS:
        ok, failed = verify_split(f, cert, samples=args.samples, seed=args.seed)
        res["verified"] = ok
        if failed:
            res["failed_check"] = failed
    return text, spec, res


def cmd_triangles(args, limits):
    spec, fields = _working_field(args, default="q")
    text, f = _read_poly(args, fields[0])
    if f.degree() != 3:
        raise PreconditionError("triangles need a cubic")
    if not is_smooth(f, seed=args.seed):
        raise PreconditionError("V(f) is singular")
    R = build_apolar_ring(f)
    x = _parse_point(args.point, fields[0], f.nvars)
    if len(R.annihilator_of(list(x.coords))) < 2:
        raise PreconditionError("the point is not in D_{n-1}: its kernel has dimension < 2")
    S = find_triangles_through(R, x, seed=args.seed, limits=limits)
    res = S.to_json()
    res["checks"] = [{
        "triangle": [str(P) for P in T],
        "is_triangle": is_triangle(R, T),
        "invariants": triangle_invariants(R, T)[0],
        "gamma_singular": gamma_singularity_check(R, (T[0], T[1]))["singular"],
    } for T in S.triangles]
    return text, spec, res


def cmd_paper_verify(args, limits):
    if args.selector != "all" and args.selector not in REGISTRY:
        raise UsageError(f"unknown selector {args.selector!r}; choose from: all, " + ", ".join(REGISTRY))
    results = run_checks(args.selector, seed=args.seed)
    res = {"checks": [r.to_json() for r in results], "passed": all(r.passed for r in results)}
    return None, args.field or "mixed", res


COMMANDS = {
    "hessian": cmd_hessian,
    "smooth": cmd_smooth,
    "apolar": cmd_apolar,
    "strata": cmd_strata,
    "ts": cmd_ts,
    "triangles": cmd_triangles,
    "paper-verify": cmd_paper_verify,
}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, int, float, str)) or x is None:
        return x
    return str(x)


def _human(result, indent=0):
    pad = "  " * indent
    lines = []
    for k, v in result.items():
        if isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.extend(_human(v, indent + 1))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(f"{pad}{k}:")
            for item in v:
                lines.extend(_human(item, indent + 1))
                lines.append("")
        else:
            lines.append(f"{pad}{k}: {v}")
    return lines


def emit(report, as_json, stream=None):
    stream = stream or sys.stdout
    if as_json:
        stream.write(json.dumps(report, sort_keys=True) + "\n")
    else:
        if "error" in report:
            stream.write(f"error ({report['error']['kind']}): {report['error']['message']}\n")
        else:
            stream.write("\n".join(_human(report["result"])) + "\n")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed < 0:
        parser.error("--seed must be nonnegative")
    limits = Limits(max_pairs=args.max_pairs, max_poly_len=args.max_poly_len)
    report = {
        "tool": "hessloci",
        "version": __version__,
        "command": args.command,
        "input": None,
        "field": args.field or "q",
        "seed": args.seed,
        "limits": {"max_pairs": limits.max_pairs, "max_poly_len": limits.max_poly_len},
    }
    t0 = time.perf_counter()
    code = EXIT_OK
    try:
        text, spec, result = COMMANDS[args.command](args, limits)
        report["input"] = text
        report["field"] = spec
        report["result"] = _jsonable(result)
        if args.command == "paper-verify" and not result["passed"]:
            code = EXIT_FAILED
    except ParseError as exc:
        report["error"] = {"kind": "parse", "message": str(exc), "offset": exc.offset}
        code = EXIT_USAGE
    except UsageError as exc:
        report["error"] = {"kind": "usage", "message": str(exc)}
        code = EXIT_USAGE
    except (SmoothnessUndecided, LimitsExceeded) as exc:
        report["error"] = {"kind": "limits", "message": str(exc)}
        code = EXIT_LIMITS
    except (PreconditionError, ValueError) as exc:
        report["error"] = {"kind": "precondition", "message": str(exc)}
        code = EXIT_PRECONDITION
    report.setdefault("result", {})
    report["timing_ms"] = round((time.perf_counter() - t0) * 1000, 3)
    if "error" in report and not args.json:
        emit(report, False, sys.stderr)
    else:
        emit(report, args.json)
    return code


if __name__ == "__main__":
    sys.exit(main())
