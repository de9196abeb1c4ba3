"""Phase-diagram classification of (alpha, beta, gamma, F0) and parameter scans.

(F')^2 = F^2 (alpha F^2 + 4 beta F + 6 gamma) has a double zero at F = 0 and
the two zeros of the quadratic factor, F2,3 = -(2 beta +- sqrt(4 beta^2 - 6 alpha gamma)) / alpha.
Which interval F0 sits in decides the solution type:

    tag  signs                               F0 range           kind
    a    alpha<0, gamma<0, beta>0, 3ga<2b^2   between the roots  Periodic
    b    alpha>0, gamma>0, beta<0, 3ga<2b^2   <= smaller root    Pulse
                                              >= larger root     Singular
    c    alpha<0, gamma>0                     <= positive root   Pulse
    d    alpha>0, gamma>0, beta<0, 3ga=2b^2   <= double root     Kink
                                              >  double root     Singular
    e    alpha<0, gamma=0, beta>0             <= root            AlgebraicPulse
    f    alpha>0, gamma>0, 2b^2<3ga           any                Unbounded

The labels "F2"/"F3" in the usual figure captions do not follow the
quadratic-formula order for alpha < 0; here roots are always reported
sorted, f2 <= f3, and case (a) means "F0 between the two positive roots".
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .ansatz_a import solve_case_a, specialize_h3h5
from .ansatz_b import solve_case_b
from .errors import GridOverflow, QcgleError, ValidationError
from .params import PARAM_KEYS, QcgleParams

EQ_TOL = 1e-9
MAX_GRID_POINTS = 10_000_000
SCAN_AXES = ("F0", "epsilon", "c1", "c3", "c5", "h1")

PERIODIC = "Periodic"
PULSE = "Pulse"
KINK = "Kink"
ALGEBRAIC_PULSE = "AlgebraicPulse"
UNBOUNDED = "Unbounded"
SINGULAR = "Singular"
INVALID = "Invalid"
BOUNDED_KINDS = frozenset({PERIODIC, PULSE, KINK, ALGEBRAIC_PULSE})


@dataclass(frozen=True)
class RootSet:
    f1: float
    f2: float
    f3: float
    discriminant: float
    real_roots: bool
    # alpha = 0: quadratic factor degenerates to 4 beta F + 6 gamma
    linear: bool = False

    def to_dict(self) -> dict:
        return {k: _jsonable(v) for k, v in self.__dict__.items()}


@dataclass(frozen=True)
class SolutionClass:
    kind: str
    figure_tag: Optional[str]
    bounded: bool
    roots: RootSet
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "figure_tag": self.figure_tag,
            "bounded": self.bounded,
            "roots": self.roots.to_dict(),
            "reason": self.reason,
        }


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _double_root_line(alpha: float, beta: float, gamma: float, eq_tol: float) -> bool:
    lhs, rhs = 3.0 * gamma * alpha, 2.0 * beta * beta
    scale = max(abs(lhs), abs(rhs))
    return scale > 0.0 and abs(lhs - rhs) <= eq_tol * scale


def _gamma_zero(alpha: float, beta: float, gamma: float, eq_tol: float) -> bool:
    if alpha == 0.0:
        return gamma == 0.0
    return abs(gamma) <= eq_tol * abs(beta * beta / alpha)


def quartic_roots(alpha: float, beta: float, gamma: float, eq_tol: float = EQ_TOL) -> RootSet:
    """Zeros of alpha F^2 + 4 beta F + 6 gamma, sorted; a near-zero discriminant is snapped to a double root."""
    disc = 4.0 * beta * beta - 6.0 * alpha * gamma
    nan = math.nan
    if alpha == 0.0:
        if beta == 0.0:
            return RootSet(0.0, nan, nan, disc, False, linear=True)
        r = -3.0 * gamma / (2.0 * beta)
        return RootSet(0.0, r, r, disc, True, linear=True)
    if _double_root_line(alpha, beta, gamma, eq_tol) or disc == 0.0:
        r = -2.0 * beta / alpha
        return RootSet(0.0, r, r, 0.0, True)
    if disc < 0.0:
        return RootSet(0.0, nan, nan, disc, False)
    sq = math.sqrt(disc)
    # cancellation-free pair: r1 r2 = 6 gamma / alpha
    q = -(2.0 * beta + math.copysign(sq, beta))
    r1 = q / alpha
    r2 = 6.0 * gamma / q if q != 0.0 else r1
    lo, hi = sorted((r1, r2))
    return RootSet(0.0, lo, hi, disc, True)


def classify(alpha: float, beta: float, gamma: float, F0: float, eq_tol: float = EQ_TOL) -> SolutionClass:
    if not (F0 > 0.0) or not math.isfinite(F0):
        raise ValidationError(f"F0 must be positive, got {F0!r}")
    roots = quartic_roots(alpha, beta, gamma, eq_tol)

    def out(kind, tag, reason=""):
        return SolutionClass(kind, tag, kind in BOUNDED_KINDS, roots, reason)

    terms = (alpha * F0 * F0, 4.0 * beta * F0, 6.0 * gamma)
    q0 = sum(terms)
    if q0 < -eq_tol * max(map(abs, terms)):
        return out(INVALID, None, "alpha F0^2 + 4 beta F0 + 6 gamma < 0: F'(0) imaginary")

    on_line = _double_root_line(alpha, beta, gamma, eq_tol)
    g_zero = _gamma_zero(alpha, beta, gamma, eq_tol)
    lo, hi = roots.f2, roots.f3

    if alpha < 0.0:
        if g_zero:
            if beta > 0.0:
                return out(ALGEBRAIC_PULSE, "e") if F0 <= hi * (1 + eq_tol) else out(INVALID, None, "F0 above the root")
            return out(INVALID, None, "alpha < 0, gamma = 0, beta <= 0: no positive root")
        if gamma < 0.0:
            if beta > 0.0 and 3.0 * gamma * alpha < 2.0 * beta * beta:
                if lo > 0.0 and lo * (1 - eq_tol) <= F0 <= hi * (1 + eq_tol):
                    return out(PERIODIC, "a")
                return out(INVALID, None, "F0 outside the positive root interval")
            return out(INVALID, None, "alpha < 0, gamma < 0 without beta > 0 and 3 gamma alpha < 2 beta^2")
        # gamma > 0: one negative and one positive root
        if F0 <= hi * (1 + eq_tol):
            return out(PULSE, "c")
        return out(INVALID, None, "F0 above the positive root")

    if alpha > 0.0 and gamma > 0.0 and not g_zero:
        if on_line:
            if beta < 0.0:
                return out(KINK, "d") if F0 <= hi else out(SINGULAR, "d")
            return out(INVALID, None, "double-root line with beta >= 0: root is not positive")
        if 2.0 * beta * beta < 3.0 * gamma * alpha:
            return out(UNBOUNDED, "f")
        if beta < 0.0:
            if F0 <= lo:
                return out(PULSE, "b")
            if F0 >= hi:
                return out(SINGULAR, "b")
            return out(INVALID, None, "F0 between the roots")
        return out(INVALID, None, "alpha > 0, gamma > 0, beta > 0: no positive root")

    return out(INVALID, None, "sign pattern of (alpha, beta, gamma) matches no phase-diagram type")


# -- scans -------------------------------------------------------------------


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    count: int

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class ScanPoint:
    point: tuple
    kind: str
    figure_tag: Optional[str]
    error: str = ""


@dataclass
class ScanConfig:
    axes: tuple[Axis, Axis, Axis]
    fixed: dict
    pipeline: str = "A"
    specialize: bool = True
    sign_c: int = 1
    sign_b1: int = 1
    eq_tol: float = EQ_TOL
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.axes) != 3:
            raise ValidationError("a scan needs exactly three axes")
        names = [a.name for a in self.axes]
        if len(set(names)) != 3:
            raise ValidationError(f"duplicate scan axes {names}")
        for n in names:
            if n not in SCAN_AXES:
                raise ValidationError(f"axis {n!r} is not one of {SCAN_AXES}")
            if n in self.fixed:
                raise ValidationError(f"{n!r} is both an axis and fixed")
        if self.pipeline not in ("A", "B"):
            raise ValidationError("pipeline must be 'A' or 'B'")
        derived = {"h3", "h5"} if (self.pipeline == "A" and self.specialize) else set()
        clash = derived & set(self.fixed)
        if clash:
            raise ValidationError(f"{sorted(clash)} are derived by the specialization and cannot be fixed")
        needed = (set(PARAM_KEYS) | {"F0"}) - derived - set(names)
        missing = needed - set(self.fixed)
        if missing:
            raise ValidationError(f"fixed set is missing {sorted(missing)}")
        unknown = set(self.fixed) - set(PARAM_KEYS) - {"F0"}
        if unknown:
            raise ValidationError(f"unknown fixed keys {sorted(unknown)}")
        total = 1
        for a in self.axes:
            if a.count < 0:
                raise ValidationError(f"axis {a.name}: negative count")
            total *= a.count
        if total > MAX_GRID_POINTS:
            raise GridOverflow(f"{total} grid points exceed the {MAX_GRID_POINTS} limit")


def evaluate_point(values: dict, cfg: ScanConfig) -> ScanPoint:
    """Run the selected pipeline and classify one parameter point."""
    point = tuple(values[a.name] for a in cfg.axes)
    v = {**cfg.fixed, **values}
    try:
        if cfg.pipeline == "A" and cfg.specialize:
            v["h3"], v["h5"] = specialize_h3h5(v["c1"], v["c3"], v["c5"], v["h1"])
        p = QcgleParams(**{k: v[k] for k in PARAM_KEYS})
        if cfg.pipeline == "A":
            res = solve_case_a(p)[0]
        else:
            res = solve_case_b(p, cfg.sign_c, cfg.sign_b1)
        cls = classify(res.alpha, res.beta, res.gamma, float(v["F0"]), cfg.eq_tol)
    except (QcgleError, ValueError) as exc:
        return ScanPoint(point, INVALID, None, type(exc).__name__)
    return ScanPoint(point, cls.kind, cls.figure_tag, cls.reason)


def _scan_chunk(args):
    cfg, first_values = args
    names = [a.name for a in cfg.axes]
    rest = [a.values() for a in cfg.axes[1:]]
    out = []
    for x0 in first_values:
        for x1, x2 in itertools.product(*rest):
            out.append(evaluate_point(dict(zip(names, (float(x0), float(x1), float(x2)))), cfg))
    return out


def scan_region(cfg: ScanConfig, workers: int = 1) -> list[ScanPoint]:
    """Classify every grid point; output order is the row-major grid order regardless of ``workers``."""
    first = cfg.axes[0].values()
    if any(a.count == 0 for a in cfg.axes):
        return []
    if workers <= 1 or len(first) < 2:
        return _scan_chunk((cfg, first))
    chunks = [(cfg, part) for part in np.array_split(first, min(workers, len(first)))]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_scan_chunk, chunks))
    return [pt for part in parts for pt in part]
