"""Command line surface: evaluate, verify, report, and solve.

Matrices travel as headerless CSV, problems as JSON bundles
{"A": [[...]], "B": [[...]], "h": {"kind": ..., "set": {...}}, "tol": {...}}.
Every run emits a RunReport as JSON (stdout or --out) whose content is
deterministic given inputs and seed, wall time aside.  Exit codes:
0 success, 1 error, 2 undecided outcome.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

import numpy as np

from .gmf import ProblemData, eval_gmf, eval_gmf_oracle
from .hset import Indicator, hspec_from_json, hspec_to_json, set_from_json
from .infproj import (
    InfProjProblem,
    cq_report,
    dual_gap,
    eval_p,
    eval_p_conj,
    subdiff_p_witness,
)
from .numlin import DEFAULT_TOL, Tolerances
from .selftest import run_all
from .smooth import FitSpec, solve_smooth
from .vgf import KyFanParams, VgfInstance, kyfan_norm, vgf_eval, vgf_gauge_decomp


class CliError(Exception):
    pass


# ---------------------------------------------------------------------------
# serialization with fixed significant digits


def _fmt_float(v: float) -> str:
    if np.isnan(v):
        return '"nan"'
    if np.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    return format(float(v), ".17g")


def _jdump(obj, indent=0) -> str:
    pad = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _jdump(obj.tolist(), indent)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [_jdump(v, indent + 1) for v in obj]
        return "[" + ", ".join(items) + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        lines = [
            f'{pad}  {json.dumps(str(k))}: {_jdump(v, indent + 1)}'
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(lines) + "\n" + pad + "}"
    raise CliError(f"unserializable value of type {type(obj).__name__}")


# ---------------------------------------------------------------------------
# parsing


def parse_matrix(path: str, symmetrize: bool = False, tol: Tolerances = DEFAULT_TOL):
    """Headerless CSV, rows of comma-separated decimals, row-major."""
    try:
        with open(path) as fh:
            rows = [line.strip() for line in fh if line.strip()]
    except OSError as exc:
        raise CliError(f"{path}: {exc}") from exc
    if not rows:
        raise CliError(f"{path}: empty matrix file")
    data = []
    for i, row in enumerate(rows):
        try:
            vals = [float(tok) for tok in row.split(",")]
        except ValueError as exc:
            raise CliError(f"{path}: row {i + 1}: {exc}") from exc
        data.append(vals)
    widths = {len(r) for r in data}
    if len(widths) != 1:
        raise CliError(f"{path}: ragged rows (widths {sorted(widths)})")
    M = np.array(data, dtype=float)
    if not np.all(np.isfinite(M)):
        raise CliError(f"{path}: non-finite entries")
    if symmetrize:
        if M.shape[0] != M.shape[1]:
            raise CliError(f"{path}: expected square matrix, got {M.shape}")
        skew = float(np.linalg.norm(M - M.T))
        if skew > tol.feas_abs * (1.0 + float(np.linalg.norm(M))):
            print(
                f"warning: {path}: symmetrized (asymmetry {skew:.3g})",
                file=sys.stderr,
            )
        M = 0.5 * (M + M.T)
    return M


def _matrix_arg(spec: str, shape, symmetrize=False, tol=DEFAULT_TOL):
    if spec == "zero":
        if shape is None:
            raise CliError('cannot infer dimensions for "zero"')
        return np.zeros(shape)
    return parse_matrix(spec, symmetrize=symmetrize, tol=tol)


def _tol_from_json(d: dict) -> Tolerances:
    base = DEFAULT_TOL
    return Tolerances(
        rank_rel=float(d.get("rank_rel", base.rank_rel)),
        psd_abs=float(d.get("psd_abs", base.psd_abs)),
        feas_abs=float(d.get("feas_abs", base.feas_abs)),
        conj_rel=float(d.get("conj_rel", base.conj_rel)),
    )


def parse_bundle(path: str, tol: Tolerances | None = None) -> InfProjProblem:
    """JSON problem bundle -> InfProjProblem."""
    try:
        with open(path) as fh:
            d = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"{path}: {exc}") from exc
    try:
        A = np.array(d["A"], dtype=float)
        B = np.array(d["B"], dtype=float)
        h = hspec_from_json(d["h"])
    except (KeyError, ValueError, TypeError) as exc:
        raise CliError(f"{path}: bad bundle: {exc}") from exc
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
        raise CliError(f"{path}: non-finite entries")
    tol = tol or _tol_from_json(d.get("tol", {}))
    try:
        return InfProjProblem(ProblemData(A, B, tol), h)
    except ValueError as exc:
        raise CliError(f"{path}: {exc}") from exc


def bundle_to_json(prob: InfProjProblem) -> dict:
    return {
        "A": prob.pd.A.tolist(),
        "B": prob.pd.B.tolist(),
        "h": hspec_to_json(prob.h),
        "tol": {
            "rank_rel": prob.pd.tol.rank_rel,
            "psd_abs": prob.pd.tol.psd_abs,
            "feas_abs": prob.pd.tol.feas_abs,
            "conj_rel": prob.pd.tol.conj_rel,
        },
    }


# ---------------------------------------------------------------------------
# report plumbing


def _digest(paths, seed) -> str:
    md = hashlib.md5()
    for p in paths:
        if p and p != "zero":
            try:
                with open(p, "rb") as fh:
                    md.update(fh.read())
            except OSError:
                md.update(p.encode())
        else:
            md.update(str(p).encode())
    md.update(str(seed).encode())
    return md.hexdigest()


def _emit(report: dict, out: str | None):
    text = _jdump(report) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _tol_dict(tol: Tolerances) -> dict:
    return {
        "rank_rel": tol.rank_rel,
        "psd_abs": tol.psd_abs,
        "feas_abs": tol.feas_abs,
        "conj_rel": tol.conj_rel,
    }


# ---------------------------------------------------------------------------
# subcommands


def _cmd_eval_gmf(args, tol):
    X = _matrix_arg(args.X, None, tol=tol)
    V = _matrix_arg(args.V, (X.shape[0], X.shape[0]), symmetrize=True, tol=tol)
    n = X.shape[0]
    A = _matrix_arg(args.A, (1, n), tol=tol)
    B = _matrix_arg(args.B, (A.shape[0], X.shape[1]), tol=tol)
    pd = ProblemData(A, B, tol)
    ev = eval_gmf(pd, X, V, tol)
    out = {"value": ev.value, "boundary": ev.boundary}
    if ev.witness_Y is not None:
        out["witness_Y"] = ev.witness_Y
    return out, 0, [args.A, args.B, args.X, args.V]


def _cmd_eval_p(args, tol):
    prob = parse_bundle(args.bundle, tol)
    X = parse_matrix(args.X, tol=tol)
    pe = eval_p(prob, X, tol, max_iter=args.max_iter, seed=args.seed)
    out = {"value": pe.value, "status": pe.status, "iters": pe.iters}
    if pe.V is not None:
        out["V"] = pe.V
    if pe.unbounded_direction is not None:
        out["unbounded_direction"] = pe.unbounded_direction
    return out, 0, [args.bundle, args.X]


def _cmd_conjugate(args, tol):
    prob = parse_bundle(args.bundle, tol)
    Y = parse_matrix(args.Y, tol=tol)
    val, status = eval_p_conj(prob, Y, tol)
    code = 2 if status != "exact" else 0
    return {"value": val, "status": status}, code, [args.bundle, args.Y]


def _cmd_dual_gap(args, tol):
    prob = parse_bundle(args.bundle, tol)
    X = parse_matrix(args.X, tol=tol)
    p, d, gap, status = dual_gap(prob, X, tol)
    code = 2 if status == "undecided" else 0
    out = {"primal": p, "dual": d, "gap": gap, "status": status}
    return out, code, [args.bundle, args.X]


def _cmd_subdiff(args, tol):
    prob = parse_bundle(args.bundle, tol)
    X = parse_matrix(args.X, tol=tol)
    Y, gap, status = subdiff_p_witness(prob, X, tol)
    code = 2 if status == "undecided" else 0
    return {"Y": Y, "fenchel_gap": gap, "status": status}, code, [args.bundle, args.X]


def _cmd_cq_report(args, tol):
    prob = parse_bundle(args.bundle, tol)
    rep = cq_report(prob, tol)
    out = {
        "pcq": rep.pcq,
        "spcq": rep.spcq,
        "bpcq": rep.bpcq,
        "ccq": rep.ccq,
        "sccq": rep.sccq,
        "notes": list(rep.notes),
    }
    verdicts = [rep.pcq, rep.spcq, rep.bpcq, rep.ccq, rep.sccq]
    code = 2 if "undecided" in verdicts else 0
    return out, code, [args.bundle]


def _vgf_instance(args, Y, tol):
    prob = parse_bundle(args.bundle, tol)
    if not isinstance(prob.h, Indicator):
        raise CliError("vgf commands need a bundle with indicator h")
    return VgfInstance(prob.h.set, Y.shape[1], tol)


def _cmd_vgf(args, tol):
    Y = parse_matrix(args.Y, tol=tol)
    inst = _vgf_instance(args, Y, tol)
    val, V = vgf_eval(inst, Y)
    out = {"value": val}
    if V is not None:
        out["V"] = V
    return out, 0, [args.bundle, args.Y]


def _cmd_kyfan(args, tol):
    X = parse_matrix(args.X, tol=tol)
    params = KyFanParams(args.p, args.k)
    return {"value": kyfan_norm(params, X)}, 0, [args.X]


def _cmd_gauge_check(args, tol):
    Y = parse_matrix(args.Y, tol=tol)
    inst = _vgf_instance(args, Y, tol)
    gval, consistent, detail = vgf_gauge_decomp(inst, Y)
    out = {"gauge": gval, "consistent": bool(consistent), "detail": detail}
    return out, 0 if consistent else 2, [args.bundle, args.Y]


def _cmd_solve(args, tol):
    try:
        with open(args.bundle) as fh:
            d = json.load(fh)
        target = np.array(d["target"], dtype=float)
        mask = np.array(d["mask"], dtype=bool)
        lam = float(d["lam"])
    except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        raise CliError(f"{args.bundle}: {exc}") from exc
    if mask.shape != target.shape:
        raise CliError("mask and target dimensions differ")
    n, m = target.shape
    fit = FitSpec.from_mask(mask, target)
    pd = ProblemData(np.zeros((1, n)), np.zeros((1, m)), tol)
    tr = solve_smooth(fit, pd, 0.5 * lam * lam * np.eye(n), max_iter=args.max_iter)
    F, g, me = tr.iterates[-1]
    out = {
        "status": tr.status,
        "final_X": tr.final_X,
        "objective": F,
        "grad_norm": g,
        "min_eig_V": me,
        "stages": len(tr.iterates),
    }
    return out, 0 if tr.status == "Converged" else 2, [args.bundle]


def _cmd_oracle_compare(args, tol):
    X = _matrix_arg(args.X, None, tol=tol)
    V = _matrix_arg(args.V, (X.shape[0], X.shape[0]), symmetrize=True, tol=tol)
    A = _matrix_arg(args.A, (1, X.shape[0]), tol=tol)
    B = _matrix_arg(args.B, (A.shape[0], X.shape[1]), tol=tol)
    pd = ProblemData(A, B, tol)
    a = eval_gmf(pd, X, V, tol).value
    b = eval_gmf_oracle(pd, X, V, tol).value
    err = abs(a - b) / (1.0 + abs(b))
    ok = err <= tol.conj_rel
    out = {"closed_form": a, "oracle": b, "rel_err": err, "agree": bool(ok)}
    return out, 0 if ok else 1, [args.A, args.B, args.X, args.V]


def _cmd_selftest(args, tol):
    import io

    buf = io.StringIO()
    ok = run_all(args.seed, stream=buf)
    sys.stdout.write(buf.getvalue())
    return {"all_pass": bool(ok), "log": buf.getvalue().splitlines()}, (
        0 if ok else 1
    ), []


_COMMANDS = {
    "eval-gmf": _cmd_eval_gmf,
    "eval-p": _cmd_eval_p,
    "conjugate": _cmd_conjugate,
    "dual-gap": _cmd_dual_gap,
    "subdiff": _cmd_subdiff,
    "cq-report": _cmd_cq_report,
    "vgf": _cmd_vgf,
    "kyfan": _cmd_kyfan,
    "gauge-check": _cmd_gauge_check,
    "solve": _cmd_solve,
    "oracle-compare": _cmd_oracle_compare,
    "selftest": _cmd_selftest,
}


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gmfkit",
        description="matrix-fractional functions, infimal projections, "
        "and related convex-analysis tools",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    default_seed = int(os.environ.get("GMFKIT_SEED", "0"))
    for name in _COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--A", default="zero")
        sp.add_argument("--B", default="zero")
        sp.add_argument("--X")
        sp.add_argument("--V")
        sp.add_argument("--Y")
        sp.add_argument("--bundle")
        sp.add_argument("--out")
        sp.add_argument("--seed", type=int, default=default_seed)
        sp.add_argument("--tol-rank", dest="tol_rank", type=float)
        sp.add_argument("--tol-psd", dest="tol_psd", type=float)
        sp.add_argument("--tol-feas", dest="tol_feas", type=float)
        sp.add_argument("--tol-conj", dest="tol_conj", type=float)
        sp.add_argument("--p", type=float, default=2.0)
        sp.add_argument("--k", type=int, default=1)
        sp.add_argument("--max-iter", dest="max_iter", type=int, default=4000)
    return ap


def _require(args, names):
    for name in names:
        if getattr(args, name) is None:
            raise CliError(f"--{name} is required for {args.command}")


_REQUIRED = {
    "eval-gmf": ["X", "V"],
    "eval-p": ["bundle", "X"],
    "conjugate": ["bundle", "Y"],
    "dual-gap": ["bundle", "X"],
    "subdiff": ["bundle", "X"],
    "cq-report": ["bundle"],
    "vgf": ["bundle", "Y"],
    "kyfan": ["X"],
    "gauge-check": ["bundle", "Y"],
    "solve": ["bundle"],
    "oracle-compare": ["X", "V"],
    "selftest": [],
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    base = DEFAULT_TOL
    tol = Tolerances(
        rank_rel=args.tol_rank if args.tol_rank is not None else base.rank_rel,
        psd_abs=args.tol_psd if args.tol_psd is not None else base.psd_abs,
        feas_abs=args.tol_feas if args.tol_feas is not None else base.feas_abs,
        conj_rel=args.tol_conj if args.tol_conj is not None else base.conj_rel,
    )
    t0 = time.time()
    try:
        _require(args, _REQUIRED[args.command])
        outputs, code, inputs = _COMMANDS[args.command](args, tol)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report = {
        "command": args.command,
        "inputs_digest": _digest(inputs, args.seed),
        "seed": args.seed,
        "tolerances": _tol_dict(tol),
        "outputs": outputs,
        "wall_time_s": time.time() - t0,
    }
    _emit(report, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
