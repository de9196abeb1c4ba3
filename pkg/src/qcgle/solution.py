"""Closed-form intensity, phase and field of the traveling waves.

The intensity is the rational function of P and P' solving
(F')^2 = alpha F^4 + 4 beta F^3 + 6 gamma F^2 with F(0) = F0:

    F = F0 [2 S P' + 4 P^2 + (8 gamma + 4 beta F0) P - 2 gamma beta F0 - 5 gamma^2]
           / [4 P^2 - 4 P (alpha F0^2 + 2 beta F0 + gamma)
              + 4 F0^2 (beta^2 - alpha gamma) + 4 beta gamma F0 + gamma^2]

with S = sqrt(alpha F0^2 + 4 beta F0 + 6 gamma). Numerator and denominator are
divided by P^2 before evaluation, so the poles of P (where F -> F0) cost
nothing.

u = 1/F obeys u'' = 2 beta + 6 gamma u, so 1/F is also an explicit quadratic,
exponential or trigonometric function of z. That form takes over where the
P-form loses digits: on the hyperbolic branch away from z = 0 (F -> 0 or F
approaching the double root) and wherever the P-form denominator nearly
cancels, which includes the points where it is 0/0 while F stays finite.

Near z = 0, F = F0 (1 - S z) + O(z^2): the closed form always starts with
F'(0) = -sqrt(Q(F0)) and is not even in z unless S = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from scipy import integrate

from .ansatz_a import CaseAResult
from .ansatz_b import CaseBResult
from .elliptic import POLE_TOL, WpInvariants, reciprocal_slope, wp_reciprocal
from .errors import InvalidProfile, PhaseUndefined, PoleHit

DEN_TOL = 1e-12
# relative tolerance for snapping onto the line 3 alpha gamma = 2 beta^2
LINE_TOL = 1e-9
KINK_TOL = 1e-12
QUAD_TOL = 1e-12


@dataclass(frozen=True)
class SolutionProfile:
    """Everything needed to evaluate F(z), phi(z) and psi(x, t), z = x - c t.

    ``g2``/``g3`` define P independently of ``gamma``; profiles built by
    :meth:`from_case_a`/:meth:`from_case_b` keep them consistent.
    """

    ansatz: str
    alpha: float
    beta: float
    gamma: float
    g2: float
    g3: float
    F0: float
    c: float = 0.0
    omega: float = 0.0
    d: Optional[float] = None
    b0: Optional[float] = None
    b1: Optional[float] = None
    pole_tol: float = POLE_TOL

    def __post_init__(self):
        if self.ansatz not in ("A", "B"):
            raise InvalidProfile(f"ansatz must be 'A' or 'B', got {self.ansatz!r}")
        if not (self.F0 > 0.0 and math.isfinite(self.F0)):
            raise InvalidProfile(f"F0 must be positive and finite, got {self.F0!r}")
        if self.ansatz == "A" and self.d is None:
            raise InvalidProfile("ansatz A profile needs the chirp d")
        if self.ansatz == "B" and (self.b0 is None or self.b1 is None):
            raise InvalidProfile("ansatz B profile needs b0 and b1")
        terms = (self.alpha * self.F0 ** 2, 4.0 * self.beta * self.F0, 6.0 * self.gamma)
        s2 = sum(terms)
        if s2 < -DEN_TOL * max(map(abs, terms)):
            raise InvalidProfile(f"alpha F0^2 + 4 beta F0 + 6 gamma = {s2!r} < 0: F'(0) is imaginary")
        object.__setattr__(self, "_s", math.sqrt(max(s2, 0.0)))
        try:
            inv = WpInvariants.from_g(self.g2, self.g3)
        except ValueError as exc:
            raise InvalidProfile(str(exc)) from None
        object.__setattr__(self, "_inv", inv)

    @classmethod
    def from_case_a(cls, res: CaseAResult, F0: float, **kw) -> "SolutionProfile":
        return cls(
            ansatz="A", alpha=res.alpha, beta=res.beta, gamma=res.gamma,
            g2=res.g2, g3=res.g3, F0=F0, c=0.0, omega=res.omega, d=res.d, **kw,
        )

    @classmethod
    def from_case_b(cls, res: CaseBResult, F0: float, **kw) -> "SolutionProfile":
        return cls(
            ansatz="B", alpha=res.alpha, beta=res.beta, gamma=res.gamma,
            g2=res.g2, g3=res.g3, F0=F0, c=res.c, omega=res.omega,
            b0=res.b0, b1=res.b1, **kw,
        )

    @property
    def invariants(self) -> WpInvariants:
        return self._inv

    @property
    def slope_root(self) -> float:
        """sqrt(alpha F0^2 + 4 beta F0 + 6 gamma) = |F'(0)| / F0."""
        return self._s

    @property
    def is_kink(self) -> bool:
        """Case B with F0 = -beta/alpha, where the phase has a closed form."""
        if self.ansatz != "B" or not (self.alpha > 0.0 and self.beta < 0.0):
            return False
        target = -self.beta / self.alpha
        return abs(self.F0 - target) <= KINK_TOL * target

    def quartic(self, F: float) -> float:
        return F * F * (self.alpha * F * F + 4.0 * self.beta * F + 6.0 * self.gamma)

    def to_dict(self) -> dict:
        return {
            k: getattr(self, k)
            for k in ("ansatz", "alpha", "beta", "gamma", "g2", "g3", "F0", "c", "omega", "d", "b0", "b1")
        }


@dataclass(frozen=True)
class FieldSample:
    x: float
    t: float
    z: float
    F: float
    phi: float
    psi_re: float
    psi_im: float


def _coeffs(prof: SolutionProfile):
    a, b, g, F0 = prof.alpha, prof.beta, prof.gamma, prof.F0
    b1 = 8.0 * g + 4.0 * b * F0
    c0 = -2.0 * g * b * F0 - 5.0 * g * g
    p = a * F0 * F0 + 2.0 * b * F0 + g
    e = 4.0 * F0 * F0 * (b * b - a * g) + 4.0 * b * g * F0 + g * g
    return b1, c0, p, e


@dataclass(frozen=True)
class _Ratio:
    """F / F0 = num / den at one z, with term-magnitude scales and z-derivatives."""

    num: float
    num_scale: float
    den: float
    den_scale: float
    dnum: float
    dden: float

    @property
    def den_vanishes(self) -> bool:
        return abs(self.den) <= DEN_TOL * self.den_scale



def _reciprocal_ratio(z: float, prof: SolutionProfile) -> _Ratio:
    u, v = wp_reciprocal(z, prof.invariants)
    b1, c0, p, e = _coeffs(prof)
    s = prof.slope_root
    num_terms = (2.0 * s * v, 4.0, b1 * u, c0 * u * u)
    den_terms = (4.0, -4.0 * p * u, e * u * u)
    du = -v
    dv = reciprocal_slope(u, prof.invariants)
    return _Ratio(
        num=sum(num_terms),
        num_scale=sum(map(abs, num_terms)),
        den=sum(den_terms),
        den_scale=sum(map(abs, den_terms)),
        dnum=2.0 * s * dv + b1 * du + 2.0 * c0 * u * du,
        dden=-4.0 * p * du + 2.0 * e * u * du,
    )


def _structural_line(prof: SolutionProfile) -> bool:
    lhs, rhs = 2.0 * prof.beta ** 2, 3.0 * prof.alpha * prof.gamma
    scale = max(abs(lhs), abs(rhs))
    return scale > 0.0 and abs(lhs - rhs) <= LINE_TOL * scale


def inverse_intensity(z: float, prof: SolutionProfile) -> tuple[float, float, float]:
    """1/F and its z-derivative, plus a magnitude scale for the value.

    With u = 1/F the quartic ODE becomes (u')^2 = alpha + 4 beta u + 6 gamma u^2,
    so u'' = 2 beta + 6 gamma u is linear and u(0) = 1/F0, u'(0) = S/F0 pin the
    same solution as the P-form. Its zeros are exactly the poles of F.
    """
    a, b, g, F0, s = prof.alpha, prof.beta, prof.gamma, prof.F0, prof.slope_root
    branch = prof.invariants.branch
    if branch == "algebraic":
        terms = (1.0 / F0, s / F0 * z, b * z * z)
        return sum(terms), s / F0 + 2.0 * b * z, sum(map(abs, terms))
    lam = 2.0 * prof.invariants.wavenumber
    shift = -b / (3.0 * g)
    if branch == "trigonometric":
        ca, cb = 1.0 / F0 - shift, s / (F0 * lam)
        co, si = math.cos(lam * z), math.sin(lam * z)
        terms = (shift, ca * co, cb * si)
        return sum(terms), lam * (cb * co - ca * si), sum(map(abs, terms))
    # hyperbolic: u = shift + A+ e^(lam z) + A- e^(-lam z) with A+- = (p +- q) / (2 F0);
    # (p + q)(p - q) = F0^2 (2 beta^2 - 3 alpha gamma) / (18 gamma^2) fixes the small one
    p, q = 1.0 + b * F0 / (3.0 * g), s / lam
    prod = 0.0 if _structural_line(prof) else F0 * F0 * (2.0 * b * b - 3.0 * a * g) / (18.0 * g * g)
    if p >= 0.0:
        plus = p + q
        minus = prod / plus if plus != 0.0 else 0.0
    else:
        minus = p - q
        plus = prod / minus
    ep = 0.5 * plus / F0 * math.exp(lam * z) if plus != 0.0 else 0.0
    em = 0.5 * minus / F0 * math.exp(-lam * z) if minus != 0.0 else 0.0
    return shift + ep + em, lam * (ep - em), abs(shift) + abs(ep) + abs(em)


# From this |k z| on, the hyperbolic branch is evaluated through 1/F, which
# keeps relative precision in the tails where the P-form cancels.
_TAIL_X = 0.5


def _inverse_ratio(z: float, prof: SolutionProfile) -> _Ratio:
    u, du, scale = inverse_intensity(z, prof)
    F0 = prof.F0
    return _Ratio(num=1.0, num_scale=1.0, den=F0 * u, den_scale=F0 * scale, dnum=0.0, dden=F0 * du)


# Below this |den| / den_scale the P-form has lost digits to cancellation.
_DEN_SWITCH = 1e-2


def _ratio(z: float, prof: SolutionProfile) -> _Ratio:
    """P-form where it is well conditioned, 1/F form otherwise.

    Each root of the P-form denominator (a quadratic in P) is reached once for
    z > 0 and once for z < 0, and at one of the two the numerator vanishes as
    well, so near those points the P-form is 0/0 while F is finite. The 1/F
    form has no such points and is also used for the hyperbolic tails.
    """
    inv = prof.invariants
    if inv.branch == "hyperbolic" and abs(inv.wavenumber * z) >= _TAIL_X:
        return _inverse_ratio(z, prof)
    r = _reciprocal_ratio(z, prof)
    if abs(r.den) < _DEN_SWITCH * r.den_scale:
        return _inverse_ratio(z, prof)
    return r


def denominator(z: float, prof: SolutionProfile) -> tuple[float, float]:
    """Denominator of the P-form divided by P^2, and its magnitude scale."""
    r = _reciprocal_ratio(z, prof)
    return r.den, r.den_scale


def intensity(z: float, prof: SolutionProfile) -> Optional[float]:
    """F(z), or ``None`` at a real pole of F."""
    r = _ratio(z, prof)
    if r.den_vanishes:
        return None
    return prof.F0 * r.num / r.den


def intensity_derivative(z: float, prof: SolutionProfile) -> Optional[float]:
    """F'(z) by exact differentiation through P, P' and P''."""
    r = _ratio(z, prof)
    if r.den_vanishes:
        return None
    return prof.F0 * (r.dnum * r.den - r.num * r.dden) / (r.den * r.den)


def intensity_kink(z: float, alpha: float, beta: float) -> Optional[float]:
    """Intensity for F0 = -beta/alpha on the structural line 3 alpha gamma = 2 beta^2."""
    if not (alpha > 0.0 and beta < 0.0):
        raise InvalidProfile(f"kink form needs alpha > 0 and beta < 0, got {alpha!r}, {beta!r}")
    gamma = 2.0 * beta * beta / (3.0 * alpha)
    inv = WpInvariants.from_gamma(gamma)
    x = 2.0 * inv.wavenumber * z
    if abs(x) >= 2.0 * _TAIL_X:
        # the same function written as the logistic front (-2 beta/alpha) / (1 + e^x)
        r = -2.0 * beta / alpha
        return r * math.exp(-x) / (1.0 + math.exp(-x)) if x > 0.0 else r / (1.0 + math.exp(x))
    u, v = wp_reciprocal(z, inv)
    b2 = beta * beta
    num = (
        b2 / (alpha * math.sqrt(alpha)) * v
        - 2.0 * beta / alpha
        - 2.0 * beta * b2 / (3.0 * alpha ** 2) * u
        + 4.0 * beta * b2 * b2 / (9.0 * alpha ** 3) * u * u
    )
    den_terms = (2.0, 2.0 * b2 / (3.0 * alpha) * u, -4.0 * b2 * b2 / (9.0 * alpha ** 2) * u * u)
    den = sum(den_terms)
    if abs(den) <= DEN_TOL * sum(map(abs, den_terms)):
        return None
    return num / den


def _scan_step(prof: SolutionProfile) -> float:
    return min(0.01, prof.invariants.period / 1000.0)


def _assert_pole_free(prof: SolutionProfile, z0: float, z1: float) -> None:
    """Refuse intervals on which 1/F reaches zero, i.e. F has a real pole."""
    if z0 == z1:
        return
    n = max(2, int(math.ceil(abs(z1 - z0) / _scan_step(prof))) + 1)
    prev = None
    for i in range(n):
        z = z0 + (z1 - z0) * i / (n - 1)
        u, _, scale = inverse_intensity(z, prof)
        if abs(u) <= DEN_TOL * scale or (prev is not None and (u > 0) != (prev > 0)):
            raise PhaseUndefined(f"intensity pole between z={z0!r} and z={z1!r} (near z={z!r})")
        prev = u


def _wavenumber_integral(prof: SolutionProfile, z0: float, z1: float) -> float:
    """Integral of b0 + b1 F from z0 to z1 (no pole check)."""
    b0, b1 = prof.b0, prof.b1

    def f(s):
        val = intensity(s, prof)
        if val is None:
            raise PhaseUndefined(f"intensity pole at z={s!r}")
        return b0 + b1 * val

    val, _ = integrate.quad(f, z0, z1, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=500)
    return val


def _kink_phase(z: float, prof: SolutionProfile) -> float:
    a, b = prof.alpha, prof.beta
    u, _ = wp_reciprocal(z, prof.invariants)
    q = b * b / (3.0 * a)
    lo, hi = 1.0 - q * u, 1.0 + 2.0 * q * u
    if lo <= 0.0 or hi <= 0.0:
        raise PhaseUndefined(f"logarithm argument crosses zero at z={z!r}")
    return (prof.b0 - b / a * prof.b1) * z + prof.b1 / (2.0 * math.sqrt(a)) * (math.log(lo) - math.log(hi))


def phase(z: float, prof: SolutionProfile) -> float:
    """phi(z) with phi(0) fixed by the closed forms (d log F0 for case A, 0 for case B)."""
    if prof.ansatz == "A":
        F = intensity(z, prof)
        if F is None or F <= 0.0:
            raise PhaseUndefined(f"F(z={z!r}) = {F!r}: log undefined")
        return prof.d * math.log(F)
    if prof.is_kink:
        return _kink_phase(z, prof)
    _assert_pole_free(prof, 0.0, z)
    return _wavenumber_integral(prof, 0.0, z)


def phase_increment(z0: float, z1: float, prof: SolutionProfile) -> float:
    """phi(z1) - phi(z0), integrating only over [z0, z1] when no closed form exists."""
    if prof.ansatz == "A" or prof.is_kink:
        return phase(z1, prof) - phase(z0, prof)
    _assert_pole_free(prof, z0, z1)
    return _wavenumber_integral(prof, z0, z1)


def phase_on_grid(zs, prof: SolutionProfile) -> list[float]:
    """Phase at every z of ``zs``; case B quadrature accumulates between neighbours."""
    zs = [float(z) for z in zs]
    if prof.ansatz == "A" or prof.is_kink:
        return [phase(z, prof) for z in zs]
    order = sorted(range(len(zs)), key=lambda i: zs[i])
    out = [0.0] * len(zs)
    # walk outward from z = 0 in both directions
    neg = [i for i in order if zs[i] < 0.0][::-1]
    pos = [i for i in order if zs[i] >= 0.0]
    for chain in (pos, neg):
        z_prev, acc = 0.0, 0.0
        for i in chain:
            acc += phase_increment(z_prev, zs[i], prof)
            z_prev = zs[i]
            out[i] = acc
    return out


def tau(z: float, prof: SolutionProfile) -> float:
    """Local wavenumber phi'(z)."""
    F = intensity(z, prof)
    if F is None:
        raise PhaseUndefined(f"intensity pole at z={z!r}")
    if prof.ansatz == "B":
        return prof.b0 + prof.b1 * F
    if F <= 0.0:
        raise PhaseUndefined(f"F(z={z!r}) = {F!r} <= 0")
    return prof.d * intensity_derivative(z, prof) / F


def field(x: float, t: float, prof: SolutionProfile, phi: Optional[float] = None) -> FieldSample:
    """psi(x, t) = sqrt(F(z)) exp(i (phi(z) - omega t)), z = x - c t.

    ``phi`` may be supplied when the caller already tracks the phase along a grid.
    """
    z = x - prof.c * t
    F = intensity(z, prof)
    if F is None:
        raise PoleHit(f"intensity pole at z={z!r}")
    if F < 0.0:
        raise PoleHit(f"negative intensity {F!r} at z={z!r} (past a pole)")
    if phi is None:
        phi = phase(z, prof)
    amp = math.sqrt(F)
    arg = phi - prof.omega * t
    return FieldSample(x=x, t=t, z=z, F=F, phi=phi, psi_re=amp * math.cos(arg), psi_im=amp * math.sin(arg))
