"""Weierstrass P on the zero-discriminant boundary g2 = 3 gamma^2, g3 = -gamma^3.

The cubic 4t^3 - g2 t - g3 factors as 4 (t - gamma/2)^2 (t + gamma), so P
collapses to elementary functions:

    gamma < 0:  P(z) = gamma/2 + A / sin^2(k z),   A = -3 gamma/2, k = sqrt(A)
    gamma > 0:  P(z) = gamma/2 + A / sinh^2(k z),  A =  3 gamma/2, k = sqrt(A)
    gamma = 0:  P(z) = 1 / z^2

Besides the plain values, :func:`wp_reciprocal` returns ``1/P`` and ``P'/P^2``,
which stay finite through the poles of P. P is strictly positive on the real
line in all three branches, so the reciprocal form never divides by zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError

POLE_TOL = 1e-9
GAMMA_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class WpInvariants:
    g2: float
    g3: float
    gamma: float

    @classmethod
    def from_gamma(cls, gamma: float) -> "WpInvariants":
        gamma = float(gamma)
        return cls(g2=3.0 * gamma * gamma, g3=-(gamma ** 3), gamma=gamma)

    @classmethod
    def from_g(cls, g2: float, g3: float, rtol: float = 1e-10) -> "WpInvariants":
        """Recover the generating gamma from (g2, g3); rejects Delta != 0."""
        g2, g3 = float(g2), float(g3)
        gamma = -math.copysign(abs(g3) ** (1.0 / 3.0), g3)
        if g2 == 0.0 and g3 == 0.0:
            return cls(g2=0.0, g3=0.0, gamma=0.0)
        if abs(g2 - 3.0 * gamma * gamma) > rtol * max(abs(g2), 3.0 * gamma * gamma, 1e-300):
            raise ValidationError(f"invariants g2={g2!r}, g3={g3!r} are not degenerate")
        return cls(g2=g2, g3=g3, gamma=gamma)

    @property
    def discriminant(self) -> float:
        return self.g2 ** 3 - 27.0 * self.g3 ** 2

    @property
    def branch(self) -> str:
        if _is_zero(self.gamma, self.g2):
            return "algebraic"
        return "trigonometric" if self.gamma < 0.0 else "hyperbolic"

    @property
    def wavenumber(self) -> float:
        """k in sin(kz) / sinh(kz); zero on the algebraic branch."""
        if self.branch == "algebraic":
            return 0.0
        return math.sqrt(1.5 * abs(self.gamma))

    @property
    def period(self) -> float:
        """Real period pi/k of the trigonometric branch, inf otherwise."""
        if self.branch != "trigonometric":
            return math.inf
        return math.pi / self.wavenumber


@dataclass(frozen=True)
class WpValue:
    p: float
    p_prime: float
    at_pole: bool


def _is_zero(gamma: float, g2: float) -> bool:
    return abs(gamma) <= GAMMA_ZERO_TOL * max(math.sqrt(abs(g2)), 1.0)


def _check_z(z) -> float:
    z = float(z)
    if not math.isfinite(z):
        raise ValidationError(f"z must be finite, got {z!r}")
    return z


def _near_pole(z: float, inv: WpInvariants, pole_tol: float) -> bool:
    if inv.branch == "trigonometric":
        period = inv.period
        r = math.remainder(z, period)
        return abs(r) < pole_tol
    return abs(z) < pole_tol


def csch(x: float) -> float:
    if abs(x) < 20.0:
        return 1.0 / math.sinh(x)
    e = math.exp(-abs(x))
    return math.copysign(2.0 * e / (1.0 - e * e), x)


def wp_eval(z: float, inv: WpInvariants, pole_tol: float = POLE_TOL) -> WpValue:
    z = _check_z(z)
    if _near_pole(z, inv, pole_tol):
        return WpValue(p=math.inf, p_prime=math.nan, at_pole=True)
    branch = inv.branch
    if branch == "algebraic":
        return WpValue(p=1.0 / (z * z), p_prime=-2.0 / z ** 3, at_pole=False)
    gamma = inv.gamma
    k = inv.wavenumber
    a = 1.5 * abs(gamma)
    if branch == "trigonometric":
        s = math.sin(k * z)
        c = math.cos(k * z)
        return WpValue(
            p=0.5 * gamma + a / (s * s),
            p_prime=-2.0 * a * k * c / s ** 3,
            at_pole=False,
        )
    cs = csch(k * z)
    coth = 1.0 / math.tanh(k * z)
    return WpValue(
        p=0.5 * gamma + a * cs * cs,
        p_prime=-2.0 * a * k * coth * cs * cs,
        at_pole=False,
    )


def wp_reciprocal(z: float, inv: WpInvariants) -> tuple[float, float]:
    """Return ``(1/P(z), P'(z)/P(z)^2)``, both smooth in z including at poles.

    Derivatives follow from ``d(1/P)/dz = -P'/P^2`` and
    ``d(P'/P^2)/dz = -2 + 3/2 g2 u^2 + 2 g3 u^3`` with ``u = 1/P``.
    """
    z = _check_z(z)
    branch = inv.branch
    if branch == "algebraic":
        return z * z, -2.0 * z
    gamma = inv.gamma
    k = inv.wavenumber
    a = 1.5 * abs(gamma)
    if branch == "trigonometric":
        s = math.sin(k * z)
        c = math.cos(k * z)
        den = 0.5 * gamma * s * s + a
        return s * s / den, -2.0 * a * k * c * s / (den * den)
    # hyperbolic; written with tanh/csch so large |z| neither overflows nor
    # divides inf by inf
    x = k * z
    if abs(x) < 20.0:
        sh = math.sinh(x)
        den = 0.5 * gamma * sh * sh + a
        return sh * sh / den, -2.0 * a * k * math.cosh(x) * sh / (den * den)
    cs = csch(x)
    u = 1.0 / (0.5 * gamma + a * cs * cs)
    coth = 1.0 / math.tanh(x)
    return u, -2.0 * a * k * coth * cs * cs * u * u


def reciprocal_slope(u: float, inv: WpInvariants) -> float:
    """z-derivative of P'/P^2 expressed through u = 1/P."""
    return -2.0 + 1.5 * inv.g2 * u * u + 2.0 * inv.g3 * u ** 3
