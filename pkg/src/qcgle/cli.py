"""Batch front-end: ``qcgle --job job.json [--out path] [--threads N] [--tol-override k=v]``.

A job is one JSON object with a ``command`` of solve, classify, scan, verify or
sample. Exit codes: 0 success, 2 existence/constraint failure (including a
failed verification), 3 invalid input, 64 malformed JSON. Failures print one
JSON line with ``error_kind`` to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Optional

import numpy as np

from . import ansatz_a, ansatz_b, verify
from .analysis import EQ_TOL, Axis, ScanConfig, classify, scan_region
from .elliptic import POLE_TOL
from .errors import PhaseUndefined, QcgleError, ValidationError
from .params import QcgleParams
from .solution import SolutionProfile, intensity, phase, phase_increment

EXIT_OK = 0
EXIT_CONSTRAINT = 2
EXIT_VALIDATION = 3
EXIT_BAD_JSON = 64

COMMANDS = ("solve", "classify", "scan", "verify", "sample")

_COMMON = {"command", "output"}
ALLOWED_KEYS = {
    "solve": _COMMON | {"params", "ansatz", "F0", "signs"},
    "classify": _COMMON | {"params", "ansatz", "F0", "signs", "branch", "coefficients"},
    "scan": _COMMON | {"axes", "fixed", "pipeline", "specialize", "signs"},
    "verify": _COMMON | {"params", "ansatz", "F0", "signs", "branch", "solve_output", "z", "x", "t", "rk4", "h"},
    "sample": _COMMON | {"params", "ansatz", "F0", "signs", "branch", "solve_output", "z", "x", "t"},
}

TOL_KEYS = {
    "ode36": verify.ODE36_TOL,
    "system": verify.SYSTEM_TOL,
    "pde": verify.PDE_TOL,
    "rk4": verify.RK4_TOL,
    "case_a": ansatz_a.D_TOL,
    "case_b": ansatz_b.B_TOL,
    "eq_tol": EQ_TOL,
    "pole_tol": POLE_TOL,
}

DEFAULT_Z = {"min": 0.05, "max": 4.4, "count": 400}
DEFAULT_X = {"min": 0.2, "max": 4.0, "count": 41}
DEFAULT_T = {"min": 0.0, "max": 2.0, "count": 41}
DEFAULT_RK4_STEPS = 10_000
DEFAULT_RK4_ZMAX = 10.0


# -- job parsing ---------------------------------------------------------------


def _require(job: dict, key: str):
    if key not in job:
        raise ValidationError(f"job for {job.get('command')!r} needs {key!r}")
    return job[key]


def _number(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{name}: expected a number, got {value!r}")
    return float(value)


def _sign(value, name: str) -> int:
    if value not in (1, -1) or isinstance(value, bool):
        raise ValidationError(f"{name}: expected +1 or -1, got {value!r}")
    return int(value)


def _signs(job: dict) -> Optional[tuple[int, int]]:
    s = job.get("signs")
    if s is None:
        return None
    if isinstance(s, dict):
        extra = set(s) - {"sign_c", "sign_b1"}
        if extra:
            raise ValidationError(f"signs: unknown keys {sorted(extra)}")
        return _sign(s.get("sign_c"), "signs.sign_c"), _sign(s.get("sign_b1"), "signs.sign_b1")
    if isinstance(s, list) and len(s) == 2:
        return _sign(s[0], "signs[0]"), _sign(s[1], "signs[1]")
    raise ValidationError("signs: expected [sign_c, sign_b1] or {sign_c, sign_b1}")


def _ansatz(job: dict) -> str:
    a = _require(job, "ansatz")
    if a not in ("A", "B"):
        raise ValidationError(f"ansatz: expected 'A' or 'B', got {a!r}")
    return a


def _params(job: dict) -> QcgleParams:
    raw = _require(job, "params")
    if not isinstance(raw, dict):
        raise ValidationError("params: expected an object")
    for k, v in raw.items():
        _number(v, f"params.{k}")
    return QcgleParams.from_dict(raw)


def _grid(spec, name: str) -> dict:
    if not isinstance(spec, dict) or set(spec) != {"min", "max", "count"}:
        raise ValidationError(f"{name}: expected {{min, max, count}}")
    count = spec["count"]
    if isinstance(count, bool) or not isinstance(count, int) or count < 0:
        raise ValidationError(f"{name}.count: expected a non-negative integer")
    return {"min": _number(spec["min"], f"{name}.min"), "max": _number(spec["max"], f"{name}.max"), "count": count}


def _grid_tuple(g: dict) -> tuple:
    return (g["min"], g["max"], g["count"])


def _output(job: dict, override: Optional[str], default_format: str) -> tuple[Optional[str], str]:
    out = job.get("output", {})
    if isinstance(out, str):
        out = {"path": out}
    if not isinstance(out, dict):
        raise ValidationError("output: expected a path string or {path, format}")
    extra = set(out) - {"path", "format"}
    if extra:
        raise ValidationError(f"output: unknown keys {sorted(extra)}")
    fmt = out.get("format", default_format)
    if fmt != default_format:
        raise ValidationError(f"output.format: {job['command']!r} writes {default_format}, got {fmt!r}")
    return override or out.get("path"), fmt


def parse_tol_overrides(items: list[str]) -> dict:
    tols = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep or key not in TOL_KEYS:
            raise ValidationError(f"--tol-override {item!r}: expected k=v with k in {sorted(TOL_KEYS)}")
        try:
            v = float(val)
        except ValueError:
            raise ValidationError(f"--tol-override {item!r}: value is not a number") from None
        if not (v > 0.0 and math.isfinite(v)):
            raise ValidationError(f"--tol-override {item!r}: value must be positive")
        tols[key] = v
    return tols


# -- pipeline helpers ------------------------------------------------------------


def _solve(p: QcgleParams, ansatz: str, signs, tols: dict) -> tuple[list, dict]:
    if ansatz == "A":
        return ansatz_a.solve_case_a(p, tols.get("case_a", ansatz_a.D_TOL)), {}
    tol = tols.get("case_b", ansatz_b.B_TOL)
    if signs is not None:
        return [ansatz_b.solve_case_b(p, signs[0], signs[1], tol)], {}
    results, failures = ansatz_b.solve_case_b_all(p, tol)
    if not results:
        # every branch failed: surface the first failure in branch order
        raise next(iter(failures.values()))
    return results, failures


def _branch_entry(res, F0: Optional[float], tols: dict) -> dict:
    entry = res.to_dict()
    if F0 is not None:
        entry["classification"] = classify(res.alpha, res.beta, res.gamma, F0, tols.get("eq_tol", EQ_TOL)).to_dict()
        if entry["ansatz"] == "B":
            entry["orientation_ok"] = res.orientation_ok(F0)
    return entry


def _f0(job: dict, required: bool = True) -> Optional[float]:
    if "F0" not in job:
        if required:
            raise ValidationError(f"job for {job['command']!r} needs 'F0'")
        return None
    F0 = _number(job["F0"], "F0")
    if not F0 > 0.0:
        raise ValidationError(f"F0 must be positive, got {F0!r}")
    return F0


def _branch_index(job: dict) -> Optional[int]:
    b = job.get("branch")
    if b is None:
        return None
    if isinstance(b, bool) or not isinstance(b, int) or b < 0:
        raise ValidationError(f"branch: expected a non-negative integer, got {b!r}")
    return b


def _pick(entries: list, index: Optional[int], F0: float):
    """Explicit index, else the first branch whose orientation fits F0 (case B), else the first."""
    if index is not None:
        if index >= len(entries):
            raise ValidationError(f"branch {index} out of range ({len(entries)} admissible)")
        return entries[index]
    for e in entries:
        if e.get("ansatz") != "B" or e["mu"] + e["kappa"] * F0 >= 0.0:
            return e
    return entries[0]


def _load_solve_output(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"solve_output: cannot read {path!r}: {exc.strerror}") from None
    if not isinstance(data, dict) or data.get("command") != "solve" or "branches" not in data:
        raise ValidationError(f"solve_output: {path!r} is not a solve result")
    return data


def _profile_from_entry(entry: dict, F0: float, pole_tol: float) -> SolutionProfile:
    keys = ("alpha", "beta", "gamma", "g2", "g3", "omega", "c")
    try:
        kw = {k: _number(entry[k], f"branch.{k}") for k in keys}
        if entry["ansatz"] == "A":
            kw["d"] = _number(entry["d"], "branch.d")
        else:
            kw["b0"] = _number(entry["b0"], "branch.b0")
            kw["b1"] = _number(entry["b1"], "branch.b1")
        ansatz = entry["ansatz"]
    except KeyError as exc:
        raise ValidationError(f"branch entry is missing {exc.args[0]!r}") from None
    return SolutionProfile(ansatz=ansatz, F0=F0, pole_tol=pole_tol, **kw)


def _resolve_profile(job: dict, tols: dict) -> tuple[QcgleParams, SolutionProfile, dict]:
    """Profile from either a solve output file or inline params + ansatz."""
    index = _branch_index(job)
    if "solve_output" in job:
        if "params" in job or "ansatz" in job or "signs" in job:
            raise ValidationError("give either solve_output or params/ansatz/signs, not both")
        data = _load_solve_output(_require(job, "solve_output"))
        p = QcgleParams.from_dict(data["params"])
        F0 = _f0(job, required=False) or data.get("F0")
        if F0 is None:
            raise ValidationError("F0 missing from both the job and the solve output")
        entries = data["branches"]
        if not entries:
            raise ValidationError("solve output has no branches")
    else:
        p = _params(job)
        F0 = _f0(job)
        results, _ = _solve(p, _ansatz(job), _signs(job), tols)
        entries = [_branch_entry(r, F0, tols) for r in results]
    entry = _pick(entries, index, F0)
    prof = _profile_from_entry(entry, F0, tols.get("pole_tol", POLE_TOL))
    return p, prof, entry


# -- serialization -------------------------------------------------------------------


def _clean(obj):
    """JSON-safe copy: non-finite floats become null, tuples become lists."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def fmt(v) -> str:
    """17 significant digits, 'nan' for missing or non-finite values."""
    if v is None:
        return "nan"
    if isinstance(v, str):
        return v
    v = float(v)
    if not math.isfinite(v):
        return "nan"
    return format(v, ".17g")


def write_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _emit(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# -- commands ----------------------------------------------------------------------


def cmd_solve(job: dict, tols: dict, threads: int) -> tuple[str, int]:
    p = _params(job)
    ansatz = _ansatz(job)
    F0 = _f0(job, required=False)
    results, failures = _solve(p, ansatz, _signs(job), tols)
    out = {
        "command": "solve",
        "ansatz": ansatz,
        "params": p.to_dict(),
        "F0": F0,
        "branches": [_branch_entry(r, F0, tols) for r in results],
    }
    if failures:
        out["rejected_branches"] = [
            {"sign_c": sc, "sign_b1": sb, "error_kind": exc.kind, "message": str(exc)}
            for (sc, sb), exc in failures.items()
        ]
    return dumps(out), EXIT_OK


def cmd_classify(job: dict, tols: dict, threads: int) -> tuple[str, int]:
    F0 = _f0(job)
    eq_tol = tols.get("eq_tol", EQ_TOL)
    if "coefficients" in job:
        if "params" in job:
            raise ValidationError("give either coefficients or params, not both")
        co = job["coefficients"]
        if not isinstance(co, dict) or set(co) != {"alpha", "beta", "gamma"}:
            raise ValidationError("coefficients: expected exactly {alpha, beta, gamma}")
        a, b, g = (_number(co[k], f"coefficients.{k}") for k in ("alpha", "beta", "gamma"))
        return dumps(classify(a, b, g, F0, eq_tol).to_dict()), EXIT_OK
    _, _, entry = _resolve_profile(job, tols)
    return dumps(classify(entry["alpha"], entry["beta"], entry["gamma"], F0, eq_tol).to_dict()), EXIT_OK


def cmd_scan(job: dict, tols: dict, threads: int) -> tuple[str, int]:
    raw_axes = _require(job, "axes")
    if not isinstance(raw_axes, list) or len(raw_axes) != 3:
        raise ValidationError("axes: expected a list of three {name, min, max, count}")
    axes = []
    for i, ax in enumerate(raw_axes):
        if not isinstance(ax, dict) or "name" not in ax:
            raise ValidationError(f"axes[{i}]: missing name")
        g = _grid({k: v for k, v in ax.items() if k != "name"}, f"axes[{i}]")
        axes.append(Axis(ax["name"], g["min"], g["max"], g["count"]))
    fixed = _require(job, "fixed")
    if not isinstance(fixed, dict):
        raise ValidationError("fixed: expected an object")
    fixed = {k: _number(v, f"fixed.{k}") for k, v in fixed.items()}
    signs = _signs(job) or (1, 1)
    specialize = job.get("specialize", True)
    if not isinstance(specialize, bool):
        raise ValidationError("specialize: expected true or false")
    cfg = ScanConfig(
        axes=tuple(axes),
        fixed=fixed,
        pipeline=job.get("pipeline", "A"),
        specialize=specialize,
        sign_c=signs[0],
        sign_b1=signs[1],
        eq_tol=tols.get("eq_tol", EQ_TOL),
    )
    points = scan_region(cfg, workers=threads)
    header = [a.name for a in axes] + ["kind", "figure_tag"]
    rows = (list(pt.point) + [pt.kind, pt.figure_tag or ""] for pt in points)
    return write_csv(header, rows), EXIT_OK


def _rk4_zmax(job: dict, prof: SolutionProfile) -> tuple[float, int]:
    spec = job.get("rk4", {})
    if not isinstance(spec, dict) or set(spec) - {"z_max", "steps"}:
        raise ValidationError("rk4: expected {z_max, steps}")
    period = prof.invariants.period
    default = period / 2.0 if math.isfinite(period) else DEFAULT_RK4_ZMAX
    z_max = _number(spec.get("z_max", default), "rk4.z_max")
    steps = spec.get("steps", DEFAULT_RK4_STEPS)
    if isinstance(steps, bool) or not isinstance(steps, int) or steps <= 0:
        raise ValidationError("rk4.steps: expected a positive integer")
    return z_max, steps


def cmd_verify(job: dict, tols: dict, threads: int) -> tuple[str, int]:
    p, prof, entry = _resolve_profile(job, tols)
    z = _grid(job.get("z", DEFAULT_Z), "z")
    x = _grid(job.get("x", DEFAULT_X), "x")
    t = _grid(job.get("t", DEFAULT_T), "t")
    h = _number(job.get("h", verify.PDE_H), "h")
    z_max, steps = _rk4_zmax(job, prof)
    oracle_tols = {k: tols[k] for k in ("ode36", "system", "pde", "rk4") if k in tols}
    res = verify.verify_all(prof, p, _grid_tuple(z), _grid_tuple(x), _grid_tuple(t), z_max, steps, oracle_tols, pde_h=h)
    out = {
        "command": "verify",
        "passed": res["passed"],
        "per_oracle": res["per_oracle"],
        "tolerances": res["tolerances"],
        "profile": prof.to_dict(),
        "params": p.to_dict(),
        "oracles": {k: r.to_dict() for k, r in res["oracles"].items()},
    }
    return dumps(out), EXIT_OK if res["passed"] else EXIT_CONSTRAINT


def _phases(zs: list[float], prof: SolutionProfile) -> list[float]:
    """Phase per z, NaN where undefined; case-B quadrature stops at the first pole outward from 0."""
    out = [math.nan] * len(zs)
    if prof.ansatz == "A" or prof.is_kink:
        for i, z in enumerate(zs):
            try:
                out[i] = phase(z, prof)
            except QcgleError:
                pass
        return out
    order = sorted(range(len(zs)), key=lambda i: zs[i])
    pos = [i for i in order if zs[i] >= 0.0]
    neg = [i for i in order if zs[i] < 0.0][::-1]
    for chain in (pos, neg):
        z_prev, acc = 0.0, 0.0
        for i in chain:
            try:
                acc += phase_increment(z_prev, zs[i], prof)
            except PhaseUndefined:
                break
            z_prev = zs[i]
            out[i] = acc
    return out


def _sample_row(z: float, phi: float, t: float, prof: SolutionProfile) -> list:
    F = intensity(z, prof)
    if F is None:
        return [None, phi, None, None]
    if F < 0.0 or not math.isfinite(phi):
        return [F, phi, None, None]
    amp = math.sqrt(F)
    arg = phi - prof.omega * t
    return [F, phi, amp * math.cos(arg), amp * math.sin(arg)]


def cmd_sample(job: dict, tols: dict, threads: int) -> tuple[str, int]:
    _, prof, _ = _resolve_profile(job, tols)
    has_x, has_t = "x" in job, "t" in job
    if has_x != has_t:
        raise ValidationError("field sampling needs both x and t grids")
    if has_x and "z" in job:
        raise ValidationError("give either a z grid or x and t grids")
    if has_x:
        xg, tg = _grid(job["x"], "x"), _grid(job["t"], "t")
        xs = np.linspace(*_grid_tuple(xg)).tolist()
        ts = np.linspace(*_grid_tuple(tg)).tolist()
        pairs = [(x, t) for t in ts for x in xs]
        zs = [x - prof.c * t for x, t in pairs]
        phis = _phases(zs, prof)
        rows = ([x, t, z] + _sample_row(z, ph, t, prof) for (x, t), z, ph in zip(pairs, zs, phis))
        return write_csv(["x", "t", "z", "F", "phi", "psi_re", "psi_im"], rows), EXIT_OK
    zg = _grid(_require(job, "z"), "z")
    zs = np.linspace(*_grid_tuple(zg)).tolist()
    phis = _phases(zs, prof)
    rows = ([z] + _sample_row(z, ph, 0.0, prof) for z, ph in zip(zs, phis))
    return write_csv(["z", "F", "phi", "psi_re", "psi_im"], rows), EXIT_OK


HANDLERS = {
    "solve": (cmd_solve, "json"),
    "classify": (cmd_classify, "json"),
    "scan": (cmd_scan, "csv"),
    "verify": (cmd_verify, "json"),
    "sample": (cmd_sample, "csv"),
}


def run(job: dict, out: Optional[str] = None, threads: int = 1, tols: Optional[dict] = None) -> int:
    """Execute one parsed job; returns the exit status. Errors propagate as QcgleError."""
    if not isinstance(job, dict):
        raise ValidationError("job: expected a JSON object")
    command = job.get("command")
    if command not in COMMANDS:
        raise ValidationError(f"command: expected one of {COMMANDS}, got {command!r}")
    unknown = set(job) - ALLOWED_KEYS[command]
    if unknown:
        raise ValidationError(f"unknown keys for {command!r}: {sorted(unknown)}")
    handler, default_format = HANDLERS[command]
    path, _ = _output(job, out, default_format)
    text, status = handler(job, tols or {}, threads)
    _emit(text, path)
    return status


def _fail(kind: str, message: str, code: int, **extra) -> int:
    sys.stderr.write(json.dumps({"error_kind": kind, "message": message, **extra}) + "\n")
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qcgle", description="Construct, classify and verify QCGLE traveling waves.")
    ap.add_argument("--job", required=True, help="JSON job file")
    ap.add_argument("--out", help="output path (overrides the job's output.path; default stdout)")
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="scan worker processes")
    ap.add_argument("--tol-override", action="append", default=[], metavar="K=V", help=f"one of {sorted(TOL_KEYS)}")
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.job, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        return _fail("ValidationError", f"cannot read job file {args.job!r}: {exc.strerror}", EXIT_VALIDATION)
    try:
        job = json.loads(text)
    except json.JSONDecodeError as exc:
        return _fail("MalformedJSON", exc.msg, EXIT_BAD_JSON, line=exc.lineno, column=exc.colno)
    try:
        if args.threads < 1:
            raise ValidationError("--threads must be at least 1")
        tols = parse_tol_overrides(args.tol_override)
        status = run(job, args.out, args.threads, tols)
    except QcgleError as exc:
        return _fail(exc.kind, str(exc), exc.exit_code)
    except OSError as exc:
        return _fail("ValidationError", f"cannot write output: {exc}", EXIT_VALIDATION)
    if status == EXIT_CONSTRAINT:
        return _fail("VerificationFailed", "at least one oracle exceeded its tolerance", status)
    return status


if __name__ == "__main__":
    sys.exit(main())
