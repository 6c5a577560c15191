"""Command-line interface; every command prints one JSON document (or CSV/text).

Exit codes: 0 success, 2 bad input, 3 not border rank 5, 4 irrational
support or failed rational witness search, 5 internal inconsistency.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from gmpy2 import mpq

from .classify import classify_rank, verify_certificate
from .construct import DEFAULT_HEIGHT, canonical_scheme, random_projectivity, sample_point, transform_sample
from .decomposition import Decomposition, verify_decomposition
from .errors import InputError, ParseError, PullbackMismatch, Waring5Error, WitnessSearchFailed
from .poly import parse_poly
from .scalars import DEFAULT_PRECISION, rational
from .schemes import DEGREE_FIVE_TYPES, JetScheme, SchemeType, hilbert_h0_h1, low_degree_curve_witness, points_h1
from .strata import DEFAULT_TRIALS, probes_to_csv, stratum_dimension
from .sylvester import binary_decomposition, binary_rank
from .witness import decompose_scheme, plane_upper_bound, structure_check

MAX_WORKERS = 4
DEFAULT_DEGREE = 9


# --------------------------------------------------------------------------
# input helpers


def _read_input(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load(path: str | None):
    """A JSON object, or the raw text when the input is not JSON."""
    text = _read_input(path).strip()
    if not text:
        raise ParseError("empty input")
    if text[0] in "{[":
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    return text


def _polynomial(obj, num_vars: int | None, d: int | None):
    if isinstance(obj, dict):
        if "f" not in obj:
            raise ParseError('JSON input needs an "f" field')
        if num_vars is None and "m" in obj:
            num_vars = int(obj["m"]) + 1
        obj = obj["f"]
    if not isinstance(obj, str):
        raise ParseError("expected a polynomial string")
    f = parse_poly(obj, num_vars)
    if d is not None and d != f.degree:
        raise InputError(f"--d {d} disagrees with the polynomial's degree {f.degree}")
    return f


def _scheme(obj) -> JetScheme:
    if not isinstance(obj, dict) or "components" not in obj:
        raise ParseError('JSON input needs a "components" scheme')
    return JetScheme.from_json(obj)


def _degree(args) -> int:
    return DEFAULT_DEGREE if args.d is None else args.d


def _type(text: str) -> SchemeType:
    return SchemeType.parse(text)


# --------------------------------------------------------------------------
# commands


def cmd_construct(args) -> dict:
    t = _type(args.type)
    A = canonical_scheme(t, args.m)
    coeffs = [[mpq(1)] * b for b in t.degrees] if args.unit_coefficients else None
    sp = sample_point(A, _degree(args), seed=args.seed, height=args.coeff_height, coefficients=coeffs)
    if args.transform:
        sp = transform_sample(sp, random_projectivity(args.m, args.seed, args.coeff_height))
    return sp.to_json()


def cmd_classify(args) -> dict:
    obj = _load(args.input)
    f = _polynomial(obj, args.num_vars, args.d)
    return classify_rank(f, seed=args.seed).to_json()


def cmd_decompose(args) -> dict:
    obj = _load(args.input)
    f = _polynomial(obj, args.num_vars, args.d)
    if isinstance(obj, dict) and "components" in obj:
        A = _scheme(obj)
        coeffs = None
        if "coefficients" in obj:
            coeffs = [[rational(c) for c in cs] for cs in obj["coefficients"]]
    else:
        A, coeffs = classify_rank(f, seed=args.seed).scheme, None
    D = decompose_scheme(f, A, coeffs, args.rational_only, args.seed, args.precision_bits)
    out = D.to_json()
    out["count"] = len(D)
    return out


def cmd_verify(args) -> dict:
    obj = _load(args.input)
    if not isinstance(obj, dict):
        raise ParseError("verify expects a JSON object")
    f = _polynomial(obj, args.num_vars, args.d)
    if "decomposition" in obj:
        D = Decomposition.from_json(obj["decomposition"])
        check = verify_decomposition(f, D)
        out = {"ok": check.ok, "count": len(D), "reasons": check.reasons}
        if check.residual is not None:
            out["residual"] = Decomposition(D.terms, D.exactness, residual=check.residual).to_json()["residual"]
        return out
    report = verify_certificate(f, _scheme(obj))
    out = report.to_json()
    out["ok"] = report.ok
    return out


def cmd_hilbert(args) -> dict:
    obj = _load(args.input)
    if not isinstance(obj, dict):
        raise ParseError("hilbert expects a JSON object")
    d = args.d if args.d is not None else obj.get("d")
    if d is None:
        raise InputError("hilbert needs a degree (--d or a \"d\" field)")
    if "points" in obj:
        pts = [[rational(x) for x in p] for p in obj["points"]]
        return {"d": d, "h1": points_h1(pts, d), "points": len(pts)}
    A = _scheme(obj)
    h0, h1 = hilbert_h0_h1(A, d)
    return {"d": d, "degree": A.degree, "h0": h0, "h1": h1}


def cmd_sylvester(args) -> dict:
    obj = _load(args.input)
    g = _polynomial(obj, 2, args.d)
    bd = binary_decomposition(g, args.rational_only, args.seed, args.precision_bits)
    if bd is None:
        raise WitnessSearchFailed("no rational decomposition found and numeric fallback is disabled")
    D = Decomposition(tuple((lam, pt) for lam, pt in bd.pairs), bd.exactness, residual=bd.residual)
    return {"rank": binary_rank(g, args.seed), "decomposition": D.to_json()}


def _probe(job):
    t, m, d, seed, trials = job
    return stratum_dimension(SchemeType.parse(t), m, d, seed, trials)


def cmd_stratum_dim(args):
    if args.sweep:
        types = [_type(args.type)] if args.type else list(DEGREE_FIVE_TYPES)
        ms = [args.m] if args.m_given else [4, 5]
        ds = [args.d] if args.d is not None else [9, 10]
        jobs = [(str(t), m, d, args.seed, args.trials) for t in types for m in ms for d in ds]
        workers = max(1, min(args.workers, len(jobs)))
        if workers == 1:
            probes = [_probe(j) for j in jobs]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                probes = list(pool.map(_probe, jobs))  # map keeps job order
        if args.output == "csv":
            return probes_to_csv(probes)
        return {"probes": [p.to_json() for p in probes]}
    if not args.type:
        raise InputError("stratum-dim needs --type (or --sweep)")
    probe = stratum_dimension(_type(args.type), args.m, _degree(args), args.seed, args.trials)
    if args.output == "csv":
        return probes_to_csv([probe])
    return probe.to_json()


def cmd_curve_witness(args) -> dict:
    obj = _load(args.input)
    if not isinstance(obj, dict) or "points" not in obj:
        raise ParseError('curve-witness expects {"points": [...]}')
    d = args.d if args.d is not None else obj.get("d", 9)
    pts = [[rational(x) for x in p] for p in obj["points"]]
    w = low_degree_curve_witness(pts, d)
    return {"d": d, "h1": points_h1(pts, d), "witness": w.to_json() if w is not None else None}


def cmd_plane_bound(args) -> dict:
    obj = _load(args.input)
    f = _polynomial(obj, args.num_vars, args.d)
    pb = plane_upper_bound(f, _scheme(obj), decompose=args.decompose, seed=args.seed)
    return pb.to_json()


def cmd_pipeline(args) -> dict:
    t = _type(args.type)
    sp = sample_point(canonical_scheme(t, args.m), _degree(args), seed=args.seed, height=args.coeff_height)
    if args.transform:
        sp = transform_sample(sp, random_projectivity(args.m, args.seed, args.coeff_height))
    report = classify_rank(sp.f, seed=args.seed)
    D = decompose_scheme(sp.f, report.scheme, None, args.rational_only, args.seed, args.precision_bits)
    check = verify_decomposition(sp.f, D)
    structure = structure_check(D, report.scheme, sp.d)
    verified = check.ok and structure.ok and len(D) == report.rank and report.type == t
    if not verified:
        problems = check.reasons + structure.reasons
        if report.type != t:
            problems.append(f"classified as {report.type}, constructed as {t}")
        if len(D) != report.rank:
            problems.append(f"{len(D)} terms for rank {report.rank}")
        raise PullbackMismatch("pipeline did not verify: " + "; ".join(problems))
    out_D = D.to_json()
    out_D["count"] = len(D)
    return {"sample": sp.to_json(), "report": report.to_json(), "decomposition": out_D, "verified": verified}


# --------------------------------------------------------------------------
# rendering and entry point


def _render_text(result) -> str:
    if isinstance(result, str):
        return result
    lines = []
    for k in sorted(result):
        v = result[k]
        if isinstance(v, (dict, list)):
            v = json.dumps(v, sort_keys=True)
        lines.append(f"{k}: {v}")
    return "\n".join(lines) + "\n"


def render(result, output: str) -> str:
    if isinstance(result, str):
        return result
    if output == "text":
        return _render_text(result)
    return json.dumps(result, indent=2, sort_keys=True) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--precision-bits", type=int, default=DEFAULT_PRECISION)
    common.add_argument("--coeff-height", type=int, default=DEFAULT_HEIGHT)
    common.add_argument("--rational-only", action="store_true")
    common.add_argument("--output", choices=("json", "csv", "text"), default="json")
    common.add_argument("--d", type=int, default=None)

    with_input = argparse.ArgumentParser(add_help=False)
    with_input.add_argument("input", nargs="?", default="-", help="file to read, or - for stdin")
    with_input.add_argument("--num-vars", type=int, default=None, help="variable count of the polynomial")

    parser = argparse.ArgumentParser(prog="waring5", description="Waring ranks of border-rank-5 forms")
    sub = parser.add_subparsers(dest="command", required=True)

    def typed(name, helptext):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--type", required=name != "stratum-dim")
        p.add_argument("--m", type=int, default=4)
        return p

    p = typed("construct", "sample a polynomial of a given type")
    p.add_argument("--unit-coefficients", action="store_true")
    p.add_argument("--transform", action="store_true", help="apply a random projectivity")
    p.set_defaults(func=cmd_construct)

    p = typed("pipeline", "construct, classify, decompose and verify")
    p.add_argument("--transform", action="store_true", help="apply a random projectivity")
    p.set_defaults(func=cmd_pipeline)

    p = typed("stratum-dim", "Jacobian rank of a type stratum")
    p.add_argument("--sweep", action="store_true")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--workers", type=int, default=min(MAX_WORKERS, os.cpu_count() or 1))
    p.set_defaults(func=cmd_stratum_dim)

    for name, func, helptext in (
        ("classify", cmd_classify, "recover the scheme, type and rank"),
        ("decompose", cmd_decompose, "explicit decomposition of rank size"),
        ("verify", cmd_verify, "check a decomposition or a scheme certificate"),
        ("hilbert", cmd_hilbert, "h0 and h1 of a scheme or point set"),
        ("sylvester", cmd_sylvester, "rank and decomposition of a binary form"),
        ("curve-witness", cmd_curve_witness, "line/conic/cubic witness for h1 > 0"),
        ("plane-bound", cmd_plane_bound, "rank bound for a planar scheme"),
    ):
        p = sub.add_parser(name, parents=[common, with_input], help=helptext)
        if name == "plane-bound":
            p.add_argument("--decompose", action="store_true")
        p.set_defaults(func=func)
    return parser


def _validate(args) -> None:
    if not 0 <= args.seed < 2**64:
        raise InputError("--seed must be a 64-bit unsigned integer")
    if args.precision_bits < 64:
        raise InputError("--precision-bits must be at least 64")
    if args.coeff_height < 2:
        raise InputError("--coeff-height must be at least 2")
    if hasattr(args, "m") and args.m < 4:
        raise InputError("--m must be at least 4")
    if args.output == "csv" and args.command != "stratum-dim":
        raise InputError("csv output is only available for stratum-dim")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    args.m_given = "--m" in argv or any(a.startswith("--m=") for a in argv)
    try:
        _validate(args)
        result = args.func(args)
    except Waring5Error as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, KeyError, TypeError) as exc:
        # malformed JSON fields surface here
        print(f"error: {exc}", file=sys.stderr)
        return InputError.exit_code
    sys.stdout.write(render(result, args.output))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
