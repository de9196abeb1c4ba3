"""Chirped branch: local wavenumber tau = d F'/F.

Matching coefficients forces a standing solution (c = 0). The chirp d must be
a common root of two quadratics, one coming from the cubic coefficients and
one from the quintic ones; that coincidence is the existence constraint.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .errors import DegenerateDivisor, EmptyResult, NotPeriodic
from .params import QcgleParams, derive_aux

D_TOL = 1e-9


@dataclass(frozen=True)
class CaseAResult:
    d: float
    omega: float
    c: float
    a: float
    b: float
    f: float
    alpha: float
    beta: float
    gamma: float
    g2: float
    g3: float
    constraint_residual: float
    branch_pair: tuple[str, str]
    # max |lhs - rhs| / scale over the six coefficient equations
    coefficient_residual: float = 0.0

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out["branch_pair"] = list(self.branch_pair)
        out["ansatz"] = "A"
        return out


def chirp_candidates(p: QcgleParams) -> tuple[dict, dict]:
    """Roots of the cubic-side and quintic-side chirp quadratics keyed by sign."""
    aux = derive_aux(p)
    if aux.d2 == 0.0:
        raise DegenerateDivisor("D2 = 0: cubic-side chirp formula divides by D2")
    if aux.d4 == 0.0:
        raise DegenerateDivisor("D4 = 0: quintic-side chirp formula divides by D4")
    root_l = math.sqrt(9.0 * aux.d3 ** 2 + 8.0 * aux.d2 ** 2)
    root_r = math.sqrt(4.0 * aux.d5 ** 2 + 3.0 * aux.d4 ** 2)
    left = {s: (-3.0 * aux.d3 + sgn * root_l) / (4.0 * aux.d2) for s, sgn in (("+", 1), ("-", -1))}
    right = {s: (-2.0 * aux.d5 + sgn * root_r) / (2.0 * aux.d4) for s, sgn in (("+", 1), ("-", -1))}
    return left, right


def _coefficients(p: QcgleParams, d: float):
    aux = derive_aux(p)
    den19 = 4.0 * p.h1 * d * d + 4.0 * p.c1 * d - p.h1
    if den19 == 0.0:
        raise DegenerateDivisor("4 h1 d^2 + 4 c1 d - h1 = 0 in the frequency formula")
    den = d * (1.0 + 4.0 * d * d) * aux.d1
    if den == 0.0:
        raise DegenerateDivisor("d (1 + 4 d^2) D1 = 0")
    omega = p.epsilon * (4.0 * p.c1 * d * d - 4.0 * p.h1 * d - p.c1) / den19
    a = (2.0 * p.epsilon * (p.c1 + 2.0 * d * p.h1) + 2.0 * omega * (2.0 * d * p.c1 - p.h1)) / den
    b = (4.0 * d * aux.d3 - 2.0 * aux.d2) / den
    f = (4.0 * d * aux.d5 - 2.0 * aux.d4) / den
    return omega, a, b, f


def coefficient_residual(p: QcgleParams, d: float, omega: float, a: float, b: float, f: float) -> float:
    """Worst normalized mismatch of the six coefficient-matching equations (c = 0)."""
    c1, h1 = p.c1, p.h1
    pairs = [
        (4.0 * omega, a * (4 * c1 * d * d - 4 * h1 * d - c1)),
        (4.0 * p.epsilon, a * (4 * h1 * d * d + 4 * c1 * d - h1)),
        (b * (2 * c1 * d * d - 3 * h1 * d - c1), 2.0 * p.c3),
        (b * (2 * h1 * d * d + 3 * c1 * d - h1), -2.0 * p.h3),
        (f * (4 * c1 * d * d - 8 * h1 * d - 3 * c1), 4.0 * p.c5),
        (f * (4 * h1 * d * d + 8 * c1 * d - 3 * h1), -4.0 * p.h5),
    ]
    return max(abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1.0) for lhs, rhs in pairs)


def solve_case_a(p: QcgleParams, tol: float = D_TOL) -> list[CaseAResult]:
    """All sign pairs whose two chirp values agree to ``tol`` (relative)."""
    left, right = chirp_candidates(p)
    results = []
    for sl, sr in itertools.product("+-", repeat=2):
        dl, dr = left[sl], right[sr]
        mismatch = abs(dl - dr)
        if mismatch > tol * max(abs(dl), abs(dr), 1e-300):
            continue
        d = dl
        omega, a, b, f = _coefficients(p, d)
        gamma = a / 6.0
        results.append(
            CaseAResult(
                d=d,
                omega=omega,
                c=0.0,
                a=a,
                b=b,
                f=f,
                alpha=f,
                beta=b / 4.0,
                gamma=gamma,
                g2=a * a / 12.0,
                g3=-(a ** 3) / 216.0,
                constraint_residual=mismatch,
                branch_pair=(sl, sr),
                coefficient_residual=coefficient_residual(p, d, omega, a, b, f),
            )
        )
    if not results:
        gaps = {f"{sl}{sr}": abs(left[sl] - right[sr]) for sl, sr in itertools.product("+-", repeat=2)}
        raise EmptyResult(f"chirp formulas disagree for every sign pair: {gaps}")
    return results


def specialize_h3h5(c1: float, c3: float, c5: float, h1: float, sign: int = 1) -> tuple[float, float]:
    """h3 = 2 c3 h1 / c1 and h5 = 3 c5 h1 / c1, which satisfy the chirp constraint.

    ``sign`` names which sign pairing of the constraint is realized
    (sign(c3/c1)); it does not change the returned values.
    """
    if c1 == 0.0:
        raise DegenerateDivisor("c1 = 0")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return 2.0 * c3 * h1 / c1, 3.0 * c5 * h1 / c1


def period_a(p: QcgleParams) -> float:
    """Spatial period pi sqrt(D1 / (epsilon h1)) of the trigonometric branch."""
    aux = derive_aux(p)
    eh = p.epsilon * p.h1
    if eh <= 0.0:
        raise NotPeriodic(f"epsilon*h1 = {eh!r} <= 0: not the periodic branch")
    return math.pi * math.sqrt(aux.d1 / eh)

