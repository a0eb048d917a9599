"""Command-line front end.

Every command reads a problem file (or ``builtin:<name>`` for the bundled
fixtures), writes CSV/JSON files into ``--out`` and reports errors as one
JSON object on stderr.  Exit status: 0 success, 2 bad input, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import exprparse, optics, spectral
from .errors import InputError, NumericalError, SPPSError
from .oracle import rk4_solve
from .output import write_csv, write_json
from .powers import ENDPOINT, FULL
from .problem import Problem, load_problem, problem_from_dict

BUILTIN = "builtin:"


def _builtin_doc(name: str) -> Dict:
    try:
        text = resources.files("spps").joinpath("problems", f"{name}.json").read_text()
    except (FileNotFoundError, OSError):
        raise InputError(f"no bundled problem named {name!r}") from None
    return json.loads(text)


def open_problem(ref: str, mode: Optional[str] = None) -> Problem:
    if ref.startswith(BUILTIN):
        prob = problem_from_dict(_builtin_doc(ref[len(BUILTIN):]))
    else:
        prob = load_problem(ref)
    return prob.with_mode(mode) if mode else prob


def open_optics(ref: str) -> optics.OpticsConfig:
    if ref.startswith(BUILTIN):
        return optics.load_config(_builtin_doc(ref[len(BUILTIN):]))
    return optics.load_config(ref)


def parse_lambda(text: str) -> List[complex]:
    try:
        return [exprparse.constant_value(part.strip()) for part in text.split(",")]
    except SPPSError as exc:
        raise InputError(f"bad --lambda value {text!r}: {exc}") from None


def parse_fix(items: Sequence[str], d: int) -> Dict[int, complex]:
    """``i=value`` with 1-based ``i`` into a 0-based dict."""
    out = {}
    for item in items or ():
        if "=" not in item:
            raise InputError(f"--fix expects i=value, got {item!r}")
        key, val = item.split("=", 1)
        try:
            i = int(key)
        except ValueError:
            raise InputError(f"--fix index must be an integer, got {key!r}") from None
        if not 1 <= i <= d:
            raise InputError(f"--fix index {i} outside 1..{d}")
        out[i - 1] = exprparse.constant_value(val)
    return out


def parse_range(text: str, with_count: bool = False):
    parts = text.split(":")
    try:
        vals = [float(v) for v in parts]
    except ValueError:
        raise InputError(f"bad range {text!r}") from None
    if with_count:
        if len(vals) != 3:
            raise InputError(f"range must be lo:hi:count, got {text!r}")
        return np.linspace(vals[0], vals[1], int(vals[2]))
    if len(vals) != 2:
        raise InputError(f"range must be lo:hi, got {text!r}")
    return vals[0], vals[1]


def parse_list(text: str) -> np.ndarray:
    """Comma list of numbers, or ``lo:hi:count``; empty string gives nothing."""
    if not text.strip():
        return np.array([])
    if ":" in text:
        return parse_range(text, with_count=True)
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise InputError(f"bad number list {text!r}") from None


def parse_grid(text: str):
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise InputError(f"--grid must look like n1xn2, got {text!r}") from None


def _cpair(z: complex) -> List[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _char(prob: Problem) -> spectral.CharPolynomial:
    return spectral.characteristic_polynomial(prob.build_series(), prob.bc)


# -- commands ----------------------------------------------------------------


def cmd_solve(args) -> List[Path]:
    prob = open_problem(args.problem, args.mode)
    if not args.lambda_:
        raise InputError("solve needs at least one --lambda")
    sset = prob.build_series()
    out = _outdir(args)
    paths = []
    for idx, text in enumerate(args.lambda_):
        lam = parse_lambda(text)
        if len(lam) != prob.d:
            raise InputError(f"--lambda {text!r} has {len(lam)} entries, problem has d={prob.d}")
        path = out / f"solution_{idx}.csv"
        sset.dump_csv(path, lam)
        paths.append(path)
    return paths


def cmd_char(args) -> List[Path]:
    prob = open_problem(args.problem, args.mode)
    chi = _char(prob)
    doc = chi.to_dict()
    if args.lambda_:
        doc["evaluations"] = [
            {"lambda": [_cpair(v) for v in parse_lambda(t)], "chi": _cpair(chi(parse_lambda(t)))}
            for t in args.lambda_
        ]
    path = _outdir(args) / "char.json"
    write_json(path, doc)
    return [path]


def cmd_section(args) -> List[Path]:
    prob = open_problem(args.problem, args.mode)
    chi = _char(prob)
    fixed = parse_fix(args.fix, prob.d)
    if prob.d - len(fixed) != 1:
        raise InputError(f"section needs exactly one free parameter; fix {prob.d - 1} of {prob.d}")
    uni = spectral.section(chi, fixed)
    roots = spectral.roots_univariate(uni, args.trust_radius)
    out = _outdir(args)
    spectral.write_roots_json(out / "roots.json", roots)
    paths = [out / "roots.json"]
    if args.range:
        lo, hi = parse_range(args.range)
        ts = np.linspace(lo, hi, args.count)
        vals = [uni([t]) for t in ts]
        write_csv(
            out / "section.csv",
            ["t", "re(chi)", "im(chi)", "log10abs"],
            ((t, v.real, v.imag, np.log10(abs(v) + 1e-300)) for t, v in zip(ts, vals)),
        )
        paths.append(out / "section.csv")
    return paths


def cmd_raster(args) -> List[Path]:
    prob = open_problem(args.problem, args.mode)
    chi = spectral.section(_char(prob), parse_fix(args.fix, prob.d))
    if chi.d != 2:
        raise InputError(f"raster needs two free parameters, have {chi.d}; use --fix")
    n1, n2 = parse_grid(args.grid)
    ras = spectral.eigencurve_raster(
        chi, spectral.AxisSpec.parse(args.axis1), spectral.AxisSpec.parse(args.axis2), n1, n2
    )
    out = _outdir(args)
    spectral.write_raster_csv(out / "raster.csv", ras)
    paths = [out / "raster.csv"]
    if ras.is_real:
        spectral.write_polylines_json(out / "curves.json", ras)
        paths.append(out / "curves.json")
    else:
        spectral.write_ridges_json(out / "ridges.json", ras)
        paths.append(out / "ridges.json")
    return paths


def cmd_optics(args) -> List[Path]:
    cfg = open_optics(args.config)
    rows = optics.rt_scan(cfg, parse_list(args.beta), parse_list(args.bl))
    path = _outdir(args) / "scan.csv"
    optics.write_scan_csv(path, rows)
    return [path]


def cmd_verify(args) -> List[Path]:
    prob = open_problem(args.problem, FULL)
    if not args.lambda_:
        raise InputError("verify needs at least one --lambda")
    sset = prob.build_series()
    chi = spectral.characteristic_polynomial(sset, prob.bc) if prob.grid.i0 == 0 else None
    bc = prob.bc
    reports = []
    for text in args.lambda_:
        lam = parse_lambda(text)
        if len(lam) != prob.d:
            raise InputError(f"--lambda {text!r} has {len(lam)} entries, problem has d={prob.d}")
        vals = sset.evaluate(lam)
        y, yp = rk4_solve(prob.p, prob.q, prob.r, prob.s, lam, [1.0, 0.0], [0.0, 1.0], args.substeps)
        series = {k: vals[k].values for k in ("V1", "V2", "V1P", "V2P")}
        ref = {"V1": y[0], "V2": y[1], "V1P": yp[0], "V2P": yp[1]}
        diff = {k: float(np.max(np.abs(series[k] - ref[k]))) for k in series}
        # solution obeying the left condition, checked against the right one
        ys = bc.alpha_p * ref["V1"] - bc.alpha * ref["V2"]
        ysp = bc.alpha_p * ref["V1P"] - bc.alpha * ref["V2P"]
        mismatch = bc.beta * ys[-1] + bc.beta_p * ysp[-1]
        rep = {
            "lambda": [_cpair(v) for v in lam],
            "max_abs_diff": diff,
            "endpoint_series": {k: _cpair(series[k][-1]) for k in series},
            "endpoint_rk4": {k: _cpair(ref[k][-1]) for k in ref},
            "boundary_mismatch_rk4": _cpair(mismatch),
        }
        if chi is not None:
            rep["chi"] = _cpair(chi(lam))
        reports.append(rep)
    path = _outdir(args) / "verify.json"
    write_json(path, {"substeps": args.substeps, "points": reports})
    return [path]


def cmd_powers_dump(args) -> List[Path]:
    prob = open_problem(args.problem, args.mode)
    out = _outdir(args)
    paths = []
    for table in prob.build_tables():
        path = out / f"powers_{table.family}.csv"
        table.dump_csv(path)
        paths.append(path)
    return paths


COMMANDS = {
    "solve": cmd_solve,
    "char": cmd_char,
    "section": cmd_section,
    "raster": cmd_raster,
    "optics": cmd_optics,
    "verify": cmd_verify,
    "powers-dump": cmd_powers_dump,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spps", description="Multiparameter spectral power series toolkit.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, problem=True, mode=True):
        if problem:
            p.add_argument("--problem", required=True, help="problem JSON path or builtin:<name>")
        p.add_argument("--out", default=".", help="output directory")
        if mode:
            p.add_argument("--mode", choices=[FULL, ENDPOINT], help="override the storage mode")

    def lam(p):
        p.add_argument("--lambda", dest="lambda_", action="append", default=[], metavar="a,b,...",
                       help="parameter point; repeatable")

    p = sub.add_parser("solve", help="evaluate v1, v2 and derivatives on the mesh")
    common(p)
    lam(p)
    p = sub.add_parser("char", help="characteristic polynomial as JSON")
    common(p)
    lam(p)
    p = sub.add_parser("section", help="roots of a one-parameter section")
    common(p)
    p.add_argument("--fix", action="append", default=[], metavar="i=value")
    p.add_argument("--range", metavar="lo:hi", help="also tabulate chi along the free axis")
    p.add_argument("--count", type=int, default=201)
    p.add_argument("--trust-radius", type=float, default=None)
    p = sub.add_parser("raster", help="chi on a 2D grid plus zero curves")
    common(p)
    p.add_argument("--fix", action="append", default=[], metavar="i=value")
    p.add_argument("--axis1", required=True, metavar="re|im:lo:hi")
    p.add_argument("--axis2", required=True, metavar="re|im:lo:hi")
    p.add_argument("--grid", default="101x101", metavar="n1xn2")
    p = sub.add_parser("optics", help="reflection/transmission scan")
    common(p, problem=False, mode=False)
    p.add_argument("--config", required=True, help="optics JSON path or builtin:<name>")
    p.add_argument("--beta", default="0", help="beta*b values: comma list or lo:hi:count")
    p.add_argument("--bl", default="0.01:1:50", help="b/lambda values: comma list or lo:hi:count")
    p = sub.add_parser("verify", help="compare the series against RK4")
    common(p, mode=False)
    lam(p)
    p.add_argument("--substeps", type=int, default=4)
    p = sub.add_parser("powers-dump", help="dump both formal-power tables as CSV")
    common(p)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        paths = COMMANDS[args.command](args)
    except SPPSError as exc:
        code = 3 if isinstance(exc, NumericalError) else 2
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return code
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
