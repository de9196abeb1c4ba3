"""Traveling branch: local wavenumber tau = b0 + b1 F with b0 = c c1 / (2 D1).

With this choice the intensity obeys the first-order relation

    F' = -F (mu + kappa F),   mu = (c h1 b1 + D2) / (2 b1 D1),
                              kappa = D4 / (2 b1 D1),

whose square is the quartic ODE with alpha = kappa^2, beta = mu kappa / 2,
gamma = mu^2 / 6; hence 3 alpha gamma = 2 beta^2 for every member.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .errors import (
    ComplexSpeed,
    ConstraintViolated,
    DegenerateDivisor,
    NegativeB1Squared,
    QcgleError,
)
from .params import AuxD, QcgleParams, derive_aux

B_TOL = 1e-9


@dataclass(frozen=True)
class CaseBResult:
    b0: float
    b1: float
    c: float
    omega: float
    alpha: float
    beta: float
    gamma: float
    g2: float
    g3: float
    constraint35_residual: float
    sign_c: int
    sign_b1: int
    # coefficients of F' = -F (mu + kappa F); fix the orientation of the solution
    mu: float = 0.0
    kappa: float = 0.0
    b1_squared_cross: float = 0.0

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out["ansatz"] = "B"
        return out

    def orientation_ok(self, F0: float) -> bool:
        """Whether the closed-form intensity (F'(0) = -sqrt(Q(F0))) obeys this branch's
        first-order relation, i.e. mu + kappa F0 >= 0."""
        return self.mu + self.kappa * F0 >= 0.0


def constraint35_residual(aux: AuxD) -> float:
    """D4 D2^2 + 4 D2 D3 D5 - 3 D4 D3^2; zero when both b1^2 formulas agree."""
    return aux.d4 * aux.d2 ** 2 + 4.0 * aux.d2 * aux.d3 * aux.d5 - 3.0 * aux.d4 * aux.d3 ** 2


def constraint35_scale(aux: AuxD) -> float:
    return max(
        abs(aux.d4 * aux.d2 ** 2),
        abs(4.0 * aux.d2 * aux.d3 * aux.d5),
        abs(3.0 * aux.d4 * aux.d3 ** 2),
    )


def solve_c5_constraint(c1: float, c3: float, h1: float, h3: float, h5: float) -> float:
    """The c5 that makes the traveling-branch constraint hold."""
    den = c3 * c3 * h1 + 4.0 * c1 * c3 * h3 - 3.0 * h1 * h3 * h3
    if den == 0.0:
        raise DegenerateDivisor("c3^2 h1 + 4 c1 c3 h3 - 3 h1 h3^2 = 0")
    return h5 * (3.0 * c1 * c3 * c3 - 4.0 * c3 * h1 * h3 - c1 * h3 * h3) / den


def b1_squared(aux: AuxD) -> float:
    """b1^2 = -D2 D4 / (4 D1 D3)."""
    if aux.d3 == 0.0:
        raise DegenerateDivisor("D3 = 0")
    return -aux.d2 * aux.d4 / (4.0 * aux.d1 * aux.d3)


def b1_squared_alt(aux: AuxD) -> float:
    """b1^2 = (2 D5 + sqrt(4 D5^2 + 3 D4^2)) / (4 D1), the positive root of the quartic-side equation."""
    return (2.0 * aux.d5 + math.sqrt(4.0 * aux.d5 ** 2 + 3.0 * aux.d4 ** 2)) / (4.0 * aux.d1)


def solve_case_b(p: QcgleParams, sign_c: int = 1, sign_b1: int = 1, tol: float = B_TOL) -> CaseBResult:
    if sign_c not in (1, -1) or sign_b1 not in (1, -1):
        raise ValueError("sign_c and sign_b1 must be +1 or -1")
    aux = derive_aux(p)
    r35 = constraint35_residual(aux)
    if abs(r35) > tol * constraint35_scale(aux):
        raise ConstraintViolated(f"D4 D2^2 + 4 D2 D3 D5 - 3 D4 D3^2 = {r35!r}")
    b1sq = b1_squared(aux)
    if b1sq < 0.0:
        raise NegativeB1Squared(f"-D2 D4 / (4 D1 D3) = {b1sq!r} < 0")
    if b1sq == 0.0:
        raise DegenerateDivisor("b1 = 0 (D2 D4 = 0)")
    b1sq_cross = b1_squared_alt(aux)
    if abs(b1sq_cross - b1sq) > tol * max(b1sq, b1sq_cross):
        raise ConstraintViolated(f"b1^2 formulas disagree: {b1sq!r} vs {b1sq_cross!r}")
    b1 = sign_b1 * math.sqrt(b1sq)

    c1, h1, eps = p.c1, p.h1, p.epsilon
    k = 4.0 * c1 * c1 + 3.0 * h1 * h1
    radicand = aux.d1 * aux.d2 ** 2 + 4.0 * (eps / h1) * b1sq * aux.d1 ** 2 * k
    if radicand < 0.0:
        raise ComplexSpeed(f"negative radicand {radicand!r} in the wave-speed formula")
    c = (-h1 * aux.d2 + sign_c * 2.0 * math.sqrt(radicand)) / (b1 * k)
    if c == 0.0:
        raise DegenerateDivisor("wave speed c = 0")
    omega = (2.0 * c1 * eps * aux.d1 - c * c * c1 * h1) / (2.0 * h1 * aux.d1)
    b0 = c * c1 / (2.0 * aux.d1)

    y = c * h1 * b1 + aux.d2
    scale = b1sq * aux.d1 ** 2
    alpha = aux.d4 ** 2 / (4.0 * scale)
    beta = y * aux.d4 / (8.0 * scale)
    gamma = y * y / (24.0 * scale)
    return CaseBResult(
        b0=b0,
        b1=b1,
        c=c,
        omega=omega,
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        g2=3.0 * gamma * gamma,
        g3=-(gamma ** 3),
        constraint35_residual=r35,
        sign_c=sign_c,
        sign_b1=sign_b1,
        mu=y / (2.0 * b1 * aux.d1),
        kappa=aux.d4 / (2.0 * b1 * aux.d1),
        b1_squared_cross=b1sq_cross,
    )


def solve_case_b_all(p: QcgleParams, tol: float = B_TOL) -> tuple[list[CaseBResult], dict]:
    """Try all four (sign_c, sign_b1) branches; return successes and per-branch failures."""
    results, failures = [], {}
    for sc, sb in itertools.product((1, -1), repeat=2):
        try:
            results.append(solve_case_b(p, sc, sb, tol))
        except QcgleError as exc:
            failures[(sc, sb)] = exc
    return results, failures


def coefficient_residuals(p: QcgleParams, res: CaseBResult) -> dict:
    """Normalized residuals of the power-matching conditions for omega, b1 and c."""
    aux = derive_aux(p)
    c1, h1, eps = p.c1, p.h1, p.epsilon
    c, b1, om = res.c, res.b1, res.omega
    d1, d2, d3, d4, d5 = aux.d1, aux.d2, aux.d3, aux.d4, aux.d5
    terms = {
        "omega": [2 * d1 * h1 * om, -2 * d1 * c1 * eps, c * c * c1 * h1],
        "quartic": [-16 * b1 ** 4 * c1 * d1 ** 2, 3 * c1 * d4 ** 2, 16 * c1 * b1 ** 2 * d1 * d5],
        "cubic": [c1 * d2 * d4, 4 * b1 ** 2 * c1 * d1 * d3],
        # F^2 coefficient after eliminating omega; its roots in c are the
        # two wave speeds
        "speed": [
            h1 * (4 * c1 * c1 + 3 * h1 * h1) * b1 * b1 * c * c,
            2 * h1 * h1 * d2 * b1 * c,
            -16 * eps * b1 * b1 * d1 * d1,
            -h1 * d2 * d2,
        ],
    }
    return {k: abs(sum(v)) / max(max(abs(t) for t in v), 1e-300) for k, v in terms.items()}
