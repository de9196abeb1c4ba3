"""Residual oracles that check a profile without trusting its construction.

* ``ode36_residual``   -- quartic intensity ODE, F' by finite differences
* ``system_residual``  -- the real/imaginary pair of reduced ODEs in (F, tau)
* ``pde_residual``     -- the full field equation on an (x, t) grid
* ``rk4_crosscheck``   -- independent integration of the intensity ODE

All derivatives here come from differences of sampled values, never from the
analytic derivative used by :func:`qcgle.solution.tau`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .elliptic import wp_eval
from .errors import AllPoles, QcgleError
from .params import QcgleParams
from .solution import SolutionProfile, intensity, phase_increment, tau
from .analysis import quartic_roots

ODE_H = 1e-5
SECOND_H = 1e-3
PDE_H = 1e-3

ODE36_TOL = 1e-6
SYSTEM_TOL = 1e-5
PDE_TOL = 1e-4
RK4_TOL = 1e-6


@dataclass
class ResidualReport:
    max_rel_residual: float
    grid: dict
    worst_point: dict
    per_equation: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "max_rel_residual": self.max_rel_residual,
            "grid": self.grid,
            "worst_point": self.worst_point,
            "per_equation": self.per_equation,
            "notes": self.notes,
        }

    def passed(self, tol: float) -> bool:
        return self.max_rel_residual <= tol


class _Skip(Exception):
    pass


def as_grid(spec) -> np.ndarray:
    """``(start, stop, count)`` or an explicit sequence of points."""
    if isinstance(spec, dict):
        spec = (spec["min"], spec["max"], spec["count"])
    if isinstance(spec, (tuple, list)) and len(spec) == 3 and isinstance(spec[2], int):
        return np.linspace(float(spec[0]), float(spec[1]), spec[2])
    return np.asarray(list(spec), dtype=float)


def _grid_desc(values: np.ndarray) -> dict:
    if len(values) == 0:
        return {"min": None, "max": None, "count": 0}
    return {"min": float(values.min()), "max": float(values.max()), "count": int(len(values))}


def _val(f: Callable[[float], Optional[float]], z: float) -> float:
    v = f(z)
    if v is None or not math.isfinite(v):
        raise _Skip
    return v


def richardson_d1(f, z: float, h: float = ODE_H) -> float:
    def central(step):
        return (_val(f, z + step) - _val(f, z - step)) / (2.0 * step)

    return (4.0 * central(h / 2.0) - central(h)) / 3.0


def richardson_d2(f, z: float, h: float = SECOND_H) -> float:
    fz = _val(f, z)

    def central(step):
        return (_val(f, z + step) - 2.0 * fz + _val(f, z - step)) / (step * step)

    return (4.0 * central(h / 2.0) - central(h)) / 3.0


def _near_wp_pole(z: float, prof: SolutionProfile, margin: float) -> bool:
    return wp_eval(z, prof.invariants, pole_tol=margin).at_pole


def ode36_residual(prof: SolutionProfile, z_grid, h: float = ODE_H) -> ResidualReport:
    """max over z of |(F')^2 - Q(F)| / max(1, |Q(F)|)."""
    zs = as_grid(z_grid)
    F = lambda z: intensity(z, prof)  # noqa: E731
    worst, worst_z, used = 0.0, None, 0
    for z in zs:
        z = float(z)
        if _near_wp_pole(z, prof, 10.0 * prof.pole_tol):
            continue
        try:
            fz = _val(F, z)
            dF = richardson_d1(F, z, h)
        except _Skip:
            continue
        q = prof.quartic(fz)
        r = abs(dF * dF - q) / max(1.0, abs(q))
        used += 1
        if r >= worst:
            worst, worst_z = r, z
    if used == 0:
        raise AllPoles("every grid point is at or next to a pole")
    return ResidualReport(
        max_rel_residual=worst,
        grid={"z": _grid_desc(zs), "used": used},
        worst_point={"z": worst_z},
        per_equation=[{"name": "quartic_ode", "max_rel_residual": worst}],
    )


def _reduced_terms(prof: SolutionProfile, p: QcgleParams, z: float, h: float, h2: float):
    F = lambda s: intensity(s, prof)  # noqa: E731
    Fz = _val(F, z)
    F1 = richardson_d1(F, z, h)
    F2 = richardson_d2(F, z, h2)
    try:
        tz = tau(z, prof)
        t1 = richardson_d1(lambda s: tau(s, prof), z, h)
    except QcgleError:
        raise _Skip
    c, om = prof.c, prof.omega
    F_2 = Fz * Fz
    real_part = [
        4 * om * F_2,
        4 * p.c3 * F_2 * Fz,
        4 * p.c5 * F_2 * F_2,
        4 * c * tz * F_2,
        -4 * p.c1 * tz * tz * F_2,
        4 * p.h1 * tz * Fz * F1,
        -p.c1 * F1 * F1,
        4 * p.h1 * t1 * F_2,
        2 * p.c1 * Fz * F2,
    ]
    imag_part = [
        -4 * p.epsilon * F_2,
        4 * p.h3 * F_2 * Fz,
        4 * p.h5 * F_2 * F_2,
        4 * p.h1 * tz * tz * F_2,
        -2 * c * Fz * F1,
        4 * p.c1 * tz * Fz * F1,
        p.h1 * F1 * F1,
        4 * p.c1 * t1 * F_2,
        -2 * p.h1 * Fz * F2,
    ]
    return real_part, imag_part


def _normalized(terms) -> float:
    scale = max(abs(t) for t in terms)
    return 0.0 if scale == 0.0 else abs(sum(terms)) / scale


def system_residual(
    prof: SolutionProfile, p: QcgleParams, z_grid, h: float = ODE_H, h2: float = SECOND_H
) -> ResidualReport:
    """Residuals of the two reduced ODEs, each normalized by its largest term."""
    zs = as_grid(z_grid)
    worst = {"real": (0.0, None), "imag": (0.0, None)}
    used = 0
    for z in zs:
        z = float(z)
        if _near_wp_pole(z, prof, 10.0 * prof.pole_tol):
            continue
        try:
            re_terms, im_terms = _reduced_terms(prof, p, z, h, h2)
        except _Skip:
            continue
        used += 1
        for key, terms in (("real", re_terms), ("imag", im_terms)):
            r = _normalized(terms)
            if r >= worst[key][0]:
                worst[key] = (r, z)
    if used == 0:
        raise AllPoles("every grid point is at or next to a pole")
    key = max(worst, key=lambda k: worst[k][0])
    return ResidualReport(
        max_rel_residual=worst[key][0],
        grid={"z": _grid_desc(zs), "used": used},
        worst_point={"z": worst[key][1], "equation": key},
        per_equation=[
            {"name": "reduced_real", "max_rel_residual": worst["real"][0], "z": worst["real"][1]},
            {"name": "reduced_imag", "max_rel_residual": worst["imag"][0], "z": worst["imag"][1]},
        ],
    )


def _pde_point(center, xp, xm, tp, tm, p: QcgleParams, h: float) -> float:
    psi_t = (tp - tm) / (2.0 * h)
    psi_xx = (xp - 2.0 * center + xm) / (h * h)
    mod2 = abs(center) ** 2
    terms = [
        1j * psi_t,
        complex(p.c3, p.h3) * mod2 * center,
        complex(p.c5, p.h5) * mod2 * mod2 * center,
        complex(p.c1, -p.h1) * psi_xx,
        -1j * p.epsilon * center,
    ]
    scale = max(abs(t) for t in terms)
    return 0.0 if scale == 0.0 else abs(sum(terms)) / scale


def pde_residual_fn(
    psi: Callable[[float, float], complex], p: QcgleParams, x_grid, t_grid, h: float = PDE_H
) -> ResidualReport:
    """Field-equation residual of an arbitrary callable psi(x, t)."""
    xs, ts = as_grid(x_grid), as_grid(t_grid)
    worst, at = 0.0, None
    for x in xs:
        for t in ts:
            x, t = float(x), float(t)
            r = _pde_point(psi(x, t), psi(x + h, t), psi(x - h, t), psi(x, t + h), psi(x, t - h), p, h)
            if r >= worst:
                worst, at = r, (x, t)
    return ResidualReport(
        max_rel_residual=worst,
        grid={"x": _grid_desc(xs), "t": _grid_desc(ts), "h": h},
        worst_point={"x": at[0], "t": at[1]} if at else {},
        per_equation=[{"name": "field_equation", "max_rel_residual": worst}],
    )


def pde_residual(prof: SolutionProfile, p: QcgleParams, x_grid, t_grid, h: float = PDE_H) -> ResidualReport:
    """Field-equation residual of the closed-form psi on an (x, t) grid.

    Every stencil is multiplied by the unit phase exp(-i (phi(z) - omega t)) of
    its centre, which leaves the normalized residual unchanged and keeps the
    phase quadrature (case B, general F0) local to the stencil.
    """
    xs, ts = as_grid(x_grid), as_grid(t_grid)
    c, om = prof.c, prof.omega

    def local(zc, z, dt):
        F = intensity(z, prof)
        if F is None or F < 0.0:
            raise _Skip
        return math.sqrt(F) * cmath.exp(1j * (phase_increment(zc, z, prof) - om * dt))

    worst, at, used, halo = 0.0, None, 0, 0
    for x in xs:
        for t in ts:
            x, t = float(x), float(t)
            zc = x - c * t
            try:
                vals = (
                    local(zc, zc, 0.0),
                    local(zc, zc + h, 0.0),
                    local(zc, zc - h, 0.0),
                    local(zc, zc - c * h, h),
                    local(zc, zc + c * h, -h),
                )
            except (_Skip, QcgleError):
                halo += 1
                continue
            used += 1
            r = _pde_point(*vals, p, h)
            if r >= worst:
                worst, at = r, (x, t)
    if used == 0:
        raise AllPoles("every stencil touches a pole")
    return ResidualReport(
        max_rel_residual=worst,
        grid={"x": _grid_desc(xs), "t": _grid_desc(ts), "h": h, "used": used},
        worst_point={"x": at[0], "t": at[1]},
        per_equation=[{"name": "field_equation", "max_rel_residual": worst}],
        notes={"halo_pole_contaminated": halo},
    )


def pde_convergence(prof: SolutionProfile, p: QcgleParams, x_grid, t_grid, h: float = PDE_H) -> float:
    """Observed order log2(r(h) / r(h/2)) of the field-equation residual."""
    r1 = pde_residual(prof, p, x_grid, t_grid, h).max_rel_residual
    r2 = pde_residual(prof, p, x_grid, t_grid, h / 2.0).max_rel_residual
    return math.log2(r1 / r2)


def rk4_crosscheck(prof: SolutionProfile, z_max: float, steps: int = 10_000) -> ResidualReport:
    """Integrate the intensity ODE by classical RK4 and compare to the closed form.

    The first-order form F' = +-sqrt(Q(F)) is singular at turning points, so the
    integration uses its derivative F'' = Q'(F)/2 with F'(0) = s sqrt(Q(F0)),
    where the sign s is read off the closed form at z = 1e-3. A turning point
    (simple root of Q) is then an ordinary sign change of F', i.e. the orbit
    reflects; reaching a double root takes infinite z, so integration halts
    once F is within 1e-12 (relative) of one.
    """
    a, b, g, F0 = prof.alpha, prof.beta, prof.gamma, prof.F0

    def accel(F):
        return 2.0 * a * F ** 3 + 6.0 * b * F * F + 6.0 * g * F

    q0 = prof.quartic(F0)
    q_scale = max(abs(a * F0 ** 4), abs(4 * b * F0 ** 3), abs(6 * g * F0 * F0), 1e-300)
    roots = quartic_roots(a, b, g)
    double = [0.0]
    if roots.real_roots and roots.f2 == roots.f3:
        double.append(roots.f2)

    turning = []
    if abs(q0) <= 1e-14 * q_scale:
        sign, G = 0.0, 0.0
        turning.append(0.0)
    else:
        probe = intensity(1e-3 * math.copysign(1.0, z_max), prof)
        delta = (probe - F0) * math.copysign(1.0, z_max) if probe is not None else 0.0
        sign = 1.0 if delta > 0 else -1.0
        G = sign * math.sqrt(max(q0, 0.0))

    hstep = z_max / steps
    F, z = F0, 0.0
    worst, worst_z, halted = 0.0, 0.0, None
    for i in range(steps):
        if any(abs(F - r) <= 1e-12 * max(abs(r), 1.0) for r in double[1:]):
            halted = "double_root"
            break
        k1f, k1g = G, accel(F)
        k2f, k2g = G + 0.5 * hstep * k1g, accel(F + 0.5 * hstep * k1f)
        k3f, k3g = G + 0.5 * hstep * k2g, accel(F + 0.5 * hstep * k2f)
        k4f, k4g = G + hstep * k3g, accel(F + hstep * k3f)
        F_new = F + hstep / 6.0 * (k1f + 2 * k2f + 2 * k3f + k4f)
        G_new = G + hstep / 6.0 * (k1g + 2 * k2g + 2 * k3g + k4g)
        z = (i + 1) * hstep
        if G != 0.0 and G_new != 0.0 and (G > 0) != (G_new > 0):
            turning.append(z)
        F, G = F_new, G_new
        if not math.isfinite(F) or abs(F) > 1e12:
            halted = "blow_up"
            break
        closed = intensity(z, prof)
        if closed is None:
            halted = "closed_form_pole"
            break
        dev = abs(F - closed) / max(1.0, abs(closed))
        if dev >= worst:
            worst, worst_z = dev, z
    return ResidualReport(
        max_rel_residual=worst,
        grid={"z": {"min": 0.0, "max": z_max, "count": steps}},
        worst_point={"z": worst_z},
        per_equation=[{"name": "rk4_vs_closed_form", "max_rel_residual": worst}],
        notes={
            "initial_slope_sign": sign,
            "turning_points": turning,
            "halted": halted,
            "z_reached": z,
        },
    )


def verify_all(
    prof: SolutionProfile,
    p: QcgleParams,
    z_grid,
    x_grid,
    t_grid,
    rk4_zmax: float,
    rk4_steps: int = 10_000,
    tols: Optional[dict] = None,
    pde_h: float = PDE_H,
) -> dict:
    """Run every oracle; returns ``{"passed": bool, "oracles": {name: report}}``."""
    tols = {"ode36": ODE36_TOL, "system": SYSTEM_TOL, "pde": PDE_TOL, "rk4": RK4_TOL, **(tols or {})}
    reports = {
        "ode36": ode36_residual(prof, z_grid),
        "system": system_residual(prof, p, z_grid),
        "pde": pde_residual(prof, p, x_grid, t_grid, pde_h),
        "rk4": rk4_crosscheck(prof, rk4_zmax, rk4_steps),
    }
    passed = {k: r.passed(tols[k]) for k, r in reports.items()}
    return {"passed": all(passed.values()), "per_oracle": passed, "tolerances": tols, "oracles": reports}

