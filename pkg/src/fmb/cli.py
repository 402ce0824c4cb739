"""Command-line interface: ``fmb <command> ...``.

Exit status is 0 on success, 1 on usage or input errors and 2 when a
verification fails.  JSON goes to stdout (or ``--output``) with floats
rounded to 12 significant digits.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction
from typing import Any

import numpy as np

from . import bounds, constructor, frames, gale
from .algebra import Field, KMatrix, hermitian_defect, herm_eigvals, numerical_rank
from .errors import FMBError, VerificationError
from .poly import rational_exponent

DEFAULT_TOL = 1e-9
SIG_DIGITS = 12


class UsageError(Exception):
    pass


class VerificationFailed(Exception):
    def __init__(self, report: dict):
        super().__init__("verification failed")
        self.report = report


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------- formatting


def _clean(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(obj, Field):
        return obj.value
    if isinstance(obj, Fraction):
        return _clean(float(obj))
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True)


def _emit(args, obj: Any) -> None:
    text = dumps(obj) + "\n"
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _tol(args) -> float:
    if getattr(args, "tol", None) is not None:
        t = args.tol
    else:
        raw = os.environ.get("FMB_TOL")
        try:
            t = float(raw) if raw else DEFAULT_TOL
        except ValueError:
            raise UsageError(f"FMB_TOL is not a number: {raw!r}") from None
    if not t > 0:
        raise UsageError("tolerance must be positive")
    return t


# ---------------------------------------------------------------------- argument types


def _p_value(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity", "oo"):
        return math.inf
    try:
        v = float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("p must be at least 1")
    return v


def _q_value(text: str) -> float:
    try:
        v = float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 1 <= v <= 2:
        raise argparse.ArgumentTypeError("q must lie in [1, 2]")
    return v


def _field(text: str) -> Field:
    try:
        return Field.parse(text.upper())
    except FMBError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text: str) -> list[int]:
    out: list[int] = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _q_list(text: str) -> list[float]:
    return [_q_value(x) for x in text.split(",") if x]


def _read_json(path: str) -> dict:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}") from None


def _load_points(path: str) -> frames.WeightedPointSet:
    obj = _read_json(path)
    if "points" in obj and obj["points"] and "w" in obj["points"][0]:
        return frames.WeightedPointSet.from_json(obj)
    return frames.TightFrame.from_json(obj).as_measure()


def _load_frame(path: str) -> frames.TightFrame:
    return frames.TightFrame.from_json(_read_json(path))


def _load_matrix(path: str) -> KMatrix:
    return KMatrix.from_json(_read_json(path))


# ---------------------------------------------------------------------- commands


def cmd_bound(args) -> dict:
    kind = args.kind
    if kind == "measure":
        return {"bound": "measure", "field": args.field, "dim": args.dim,
                **bounds.moment_bound(args.field, args.dim, args.q).to_json()}
    if kind == "frame":
        etf = bounds.etf_energy_bound(args.field, args.dim, args.n, args.q)
        meas = bounds.measure_frame_energy_bound(args.field, args.dim, args.n, args.q)
        best, tag = bounds.best_frame_energy_bound(args.field, args.dim, args.n, args.q)
        return {"bound": "frame", "field": args.field, "dim": args.dim, "N": args.n, "q": args.q,
                "etf": etf.value, "max_simplex": meas, "value": best, "tag": tag,
                "etf_certificate": etf.certificate.to_json() if etf.certificate else None}
    if kind == "lp":
        qr = rational_exponent(args.q)
        if qr is None:
            raise UsageError("the LP bound needs a rational q")
        mode = "frame" if args.n else "measure"
        res = bounds.lp_bound(args.field, args.dim, qr, args.degree, grid=args.grid, mode=mode, N=args.n)
        return {"bound": f"lp-{mode}", "field": args.field, **res.to_json()}
    if kind == "pframe":
        r = bounds.p_frame_energy_lower_bound(args.field, args.n, args.dim, args.p)
        return {"bound": "pframe", "field": args.field, "N": args.n, "dim": args.dim, "p": args.p,
                "moment": r.moment, "welch": r.welch, "value": r.value, "q": r.q}
    if kind == "infty":
        return {"bound": "infty", "N": args.n, "dim": args.dim,
                "value": bounds.infinity_moment_bound(args.n, args.dim)}
    raise UsageError(f"unknown bound {kind!r}")


def cmd_moment(args) -> dict:
    ps = _load_points(args.input)
    iso = frames.isotropy_check(ps, _tol(args))
    return {"q": args.q, "moment": frames.q_moment(ps, args.q), "isotropy_deviation": iso.deviation,
            "isotropic": iso.passed,
            "bound": bounds.moment_closed_form(ps.field, ps.dim, args.q) if ps.dim >= 2 else None}


def cmd_energy(args) -> dict:
    obj = _read_json(args.input)
    if "points" in obj:
        if args.q is None:
            raise UsageError("energy of a point set needs --q")
        fr = frames.TightFrame.from_json(obj)
        return {"q": args.q, "energy": frames.q_energy(fr, args.q), "N": fr.size, "dim": fr.dim}
    if args.p is None:
        raise UsageError("energy of a Gram matrix needs --p")
    A = KMatrix.from_json(obj)
    return {"p": args.p, "p_frame_energy": frames.p_frame_energy(A, args.p, _tol(args)), "N": A.rows}


def _verified(report: dict) -> dict:
    if not report["passed"]:
        raise VerificationFailed(report)
    return report


def cmd_verify(args) -> dict:
    tol = _tol(args)
    if args.what == "isotropy":
        ps = _load_points(args.input)
        rep = frames.isotropy_check(ps, tol)
        return _verified({"check": "isotropy", "deviation": rep.deviation, "tol": tol, "passed": rep.passed,
                          "failures": [] if rep.passed else ["isotropy deviation exceeds tolerance"]})
    if args.what == "frame":
        fr = _load_frame(args.input)
        dev = fr.deviation()
        ok = dev <= tol
        return _verified({"check": "frame", "deviation": dev, "frame_constant": fr.frame_constant,
                          "N": fr.size, "dim": fr.dim, "tol": tol, "passed": ok,
                          "failures": [] if ok else ["frame operator is not a multiple of the identity"]})
    A = _load_matrix(args.input)
    fails = []
    diag_dev = float(np.abs(A.real_diag() - 1).max()) if A.rows == A.cols else math.inf
    if diag_dev > tol:
        fails.append("diagonal is not all ones")
    herm = hermitian_defect(A) if A.rows == A.cols else math.inf
    min_eig = None
    if herm > tol:
        fails.append("matrix is not Hermitian")
    else:
        min_eig = float(herm_eigvals(A, tol)[0])
        if min_eig < -tol:
            fails.append("matrix is not positive semidefinite")
    rank = numerical_rank(A)
    if args.rank is not None and rank != args.rank:
        fails.append(f"rank is {rank}, expected {args.rank}")
    return _verified({"check": "gram", "diag_deviation": diag_dev, "hermitian_defect": herm,
                      "min_eig": min_eig, "rank": rank, "tol": tol, "passed": not fails, "failures": fails})


def cmd_gale(args) -> dict:
    A = _load_matrix(args.input)
    res = gale.gale_dual_isotropic(A, args.dim)
    out = {"dual": res.dual_frame.to_json(), "frame_constant": res.dual_frame.frame_constant,
           "tight_deviation": res.dual_frame.deviation(), "residual": res.residual}
    if args.p is not None:
        out["duality"] = gale.duality_check(A, res, args.p).to_json()
    if args.dual_output:
        with open(args.dual_output, "w", encoding="utf-8") as fh:
            fh.write(dumps(res.dual_frame.to_json()) + "\n")
    tol = _tol(args)
    ok = out["tight_deviation"] <= tol and res.residual <= tol * A.rows
    if "duality" in out:
        ok = ok and out["duality"]["passed"]
    out["passed"] = ok
    if not ok:
        out["failures"] = ["dual frame or annihilation check failed"]
        raise VerificationFailed(out)
    return out


def cmd_construct(args) -> dict:
    if args.what == "family":
        base = frames.catalog(args.simplex)
        spec = constructor.family_spec(base.gram(), args.b, args.alpha)
        A = constructor.family_matrix(spec)
        rep = constructor.family_checks(spec, A, _tol(args))
        out = {"gram": A.to_json(), "alpha": spec.alpha, "beta_coef": spec.beta_coef,
               "gamma_coef": spec.gamma_coef, "lambda": spec.lam, "k": spec.k, "report": rep.to_json()}
        if not rep.passed:
            raise VerificationFailed({**out, "passed": False, "failures": ["family checks failed"]})
        return out
    A, rep = constructor.sharp_code(args.simplex, args.b, args.p)
    out = {"gram": A.to_json(), "report": rep.to_json()}
    if not rep.passed:
        raise VerificationFailed({**out, "passed": False, "failures": ["energy does not meet the bound"]})
    return out


def cmd_perturb(args) -> dict:
    ps = _load_points(args.input)
    out_ps = frames.perturb_orthogonal(ps, args.u, args.u1, args.delta)
    res = {"points": out_ps.to_json(), "isotropy_deviation": frames.isotropy_check(out_ps).deviation}
    if args.q is not None:
        before, after = frames.q_moment(ps, args.q), frames.q_moment(out_ps, args.q)
        res.update({"q": args.q, "moment_before": before, "moment_after": after, "increase": after - before})
    return res


def _catalog_frame(args) -> frames.TightFrame:
    name = args.name
    if name in ("orthonormal",):
        return frames.orthonormal(args.dim or 2, args.field or Field.R)
    if name == "simplex":
        return frames.simplex(args.dim or 2)
    if name == "polygon_diagonals":
        return frames.polygon_diagonals(args.m or 3)
    if name in ("doubled", "copies"):
        if not args.base:
            raise UsageError(f"{name} needs --base")
        base = frames.catalog(args.base) if args.base not in ("orthonormal", "simplex") else (
            frames.orthonormal(args.dim or 2, args.field or Field.R) if args.base == "orthonormal"
            else frames.simplex(args.dim or 2))
        return frames.copies(base, 2 if name == "doubled" else (args.b or 2))
    if name == "random_tight":
        if not (args.dim and args.n):
            raise UsageError("random_tight needs --dim and --n")
        rng = np.random.default_rng(args.seed)
        return frames.random_tight_frame(args.field or Field.R, args.dim, args.n, rng)
    return frames.catalog(name)


def cmd_catalog(args) -> Any:
    if args.what == "list":
        return {"entries": sorted(list(frames.CATALOG) + ["random_tight"]),
                "tight_simplices": list(frames.TIGHT_SIMPLICES)}
    if not args.name:
        raise UsageError("catalog emit needs a name")
    fr = _catalog_frame(args)
    unit = np.allclose(np.sqrt((fr.vectors.abs() ** 2).sum(axis=0)), 1.0)
    if unit:
        return fr.as_measure().to_json()
    return fr.to_json()


SWEEP_COLUMNS = ["field", "d", "N", "q", "M", "etf", "max_simplex", "best", "tag"]


def cmd_sweep(args) -> dict:
    rows = []
    for fld in args.fields:
        for d in args.dims:
            M = bounds.max_simplex_params(fld, d).M
            for N in range(d + 1, M + args.extra + 1):
                for q in args.qs:
                    etf = bounds.etf_energy_bound(fld, d, N, q).value
                    meas = bounds.measure_frame_energy_bound(fld, d, N, q)
                    best, tag = bounds.best_frame_energy_bound(fld, d, N, q)
                    row = {"field": fld.value, "d": d, "N": N, "q": q, "M": M,
                           "etf": etf, "max_simplex": meas, "best": best, "tag": tag}
                    if args.lp_degree:
                        qr = rational_exponent(q)
                        lp = bounds.lp_bound(fld, d, qr, args.lp_degree, mode="frame", N=N)
                        row["lp"] = lp.value
                        row["lp_rigorous"] = lp.rigorous
                    rows.append(row)
    cols = SWEEP_COLUMNS + (["lp", "lp_rigorous"] if args.lp_degree else [])
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(_clean(r))
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    return {"columns": cols, "rows": rows, "csv": None if args.csv else buf.getvalue()}


# ---------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="fmb", description="Moment and energy bounds for isotropic measures, tight frames and projective codes.")
    ap.add_argument("--tol", type=float, default=None, help="verification tolerance (default: $FMB_TOL or 1e-9)")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(p):
        p.add_argument("--output", "-o", help="write JSON here instead of stdout")
        p.add_argument("--tol", type=float, default=argparse.SUPPRESS)
        return p

    b = common(sub.add_parser("bound", help="closed-form and LP bounds"))
    b.add_argument("kind", choices=["measure", "frame", "lp", "pframe", "infty"])
    b.add_argument("--field", type=_field, default=Field.R)
    b.add_argument("--dim", "-d", type=int, required=True)
    b.add_argument("--n", "-N", type=int, default=None)
    b.add_argument("--q", type=_q_value, default=1.0)
    b.add_argument("--p", type=_p_value, default=2.0)
    b.add_argument("--degree", type=int, default=8)
    b.add_argument("--grid", type=int, default=400)
    b.set_defaults(func=cmd_bound)

    m = common(sub.add_parser("moment", help="q-th moment of a weighted point set"))
    m.add_argument("--input", "-i", required=True)
    m.add_argument("--q", type=_q_value, required=True)
    m.set_defaults(func=cmd_moment)

    e = common(sub.add_parser("energy", help="q-energy of a frame or p-frame energy of a Gram matrix"))
    e.add_argument("--input", "-i", required=True)
    e.add_argument("--q", type=_p_value, default=None)
    e.add_argument("--p", type=_p_value, default=None)
    e.set_defaults(func=cmd_energy)

    v = common(sub.add_parser("verify", help="isotropy, tight-frame or Gram checks"))
    v.add_argument("what", choices=["isotropy", "frame", "gram"])
    v.add_argument("--input", "-i", required=True)
    v.add_argument("--rank", type=int, default=None)
    v.set_defaults(func=cmd_verify)

    g = common(sub.add_parser("gale", help="isotropic Gale dual of a rank-deficient matrix"))
    g.add_argument("--input", "-i", required=True)
    g.add_argument("--dim", "-d", type=int, required=True, help="rank of the input matrix")
    g.add_argument("--p", type=_p_value, default=None, help="also run the Hoelder duality check")
    g.add_argument("--dual-output", default=None, help="write the dual frame JSON here")
    g.set_defaults(func=cmd_gale)

    c = common(sub.add_parser("construct", help="Gram families and sharp codes"))
    c.add_argument("what", choices=["family", "sharp"])
    c.add_argument("--simplex", default="hexagon")
    c.add_argument("--b", type=int, default=2)
    c.add_argument("--alpha", type=float, default=None)
    c.add_argument("--p", type=_p_value, default=2.0)
    c.set_defaults(func=cmd_construct)

    pt = common(sub.add_parser("perturb", help="split a point orthogonal to another, keeping isotropy"))
    pt.add_argument("--input", "-i", required=True)
    pt.add_argument("--u", type=int, default=0)
    pt.add_argument("--u1", type=int, default=1)
    pt.add_argument("--delta", type=float, required=True)
    pt.add_argument("--q", type=_q_value, default=None)
    pt.set_defaults(func=cmd_perturb)

    cat = common(sub.add_parser("catalog", help="list or emit catalog configurations"))
    cat.add_argument("what", choices=["list", "emit"])
    cat.add_argument("name", nargs="?")
    cat.add_argument("--dim", "-d", type=int, default=None)
    cat.add_argument("--n", "-N", type=int, default=None)
    cat.add_argument("--m", type=int, default=None)
    cat.add_argument("--b", type=int, default=None)
    cat.add_argument("--base", default=None)
    cat.add_argument("--field", type=_field, default=None)
    cat.add_argument("--seed", type=int, default=0)
    cat.set_defaults(func=cmd_catalog)

    sw = common(sub.add_parser("sweep", help="tabulate frame bounds over (d, N, q)"))
    sw.add_argument("--fields", type=lambda s: [_field(x) for x in s.split(",")], default=[Field.R])
    sw.add_argument("--dims", type=_int_list, default=[2, 3, 4])
    sw.add_argument("--qs", type=_q_list, default=[1.0])
    sw.add_argument("--extra", type=int, default=5, help="N runs up to M + extra")
    sw.add_argument("--lp-degree", type=int, default=0)
    sw.add_argument("--csv", default=None)
    sw.set_defaults(func=cmd_sweep)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        result = args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"fmb: error: {exc}\n")
        return 1
    except VerificationFailed as exc:
        sys.stdout.write(dumps(exc.report) + "\n")
        return 2
    except VerificationError as exc:
        sys.stdout.write(dumps({"passed": False, "failures": [str(exc)]}) + "\n")
        return 2
    except FMBError as exc:
        sys.stderr.write(f"fmb: error: {exc}\n")
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    _emit(args, result)
    return 0


if __name__ == "__main__":
    sys.exit(main())
