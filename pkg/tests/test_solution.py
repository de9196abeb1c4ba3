import dataclasses
import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from qcgle.elliptic import WpInvariants, wp_eval
from qcgle.errors import InvalidProfile, PhaseUndefined, PoleHit
from qcgle.solution import (
    SolutionProfile,
    denominator,
    field,
    intensity,
    intensity_derivative,
    intensity_kink,
    phase,
    phase_on_grid,
    tau,
)

from conftest import KINK_F0


def make_profile(alpha, beta, gamma, F0, ansatz="B", **kw):
    inv = WpInvariants.from_gamma(gamma)
    extra = {"d": 0.3} if ansatz == "A" else {"b0": 0.2, "b1": 0.7}
    return SolutionProfile(ansatz, alpha, beta, gamma, inv.g2, inv.g3, F0, **{**extra, **kw})


def literal_intensity(z, prof):
    """The closed form written directly in P and P', no rearrangement."""
    a, b, g, F0 = prof.alpha, prof.beta, prof.gamma, prof.F0
    w = wp_eval(z, prof.invariants)
    P, dP = w.p, w.p_prime
    s = math.sqrt(a * F0 ** 2 + 4 * b * F0 + 6 * g)
    num = 2 * s * dP + 4 * P ** 2 + (8 * g + 4 * b * F0) * P - 2 * g * b * F0 - 5 * g ** 2
    den = 4 * P ** 2 - 4 * P * (a * F0 ** 2 + 2 * b * F0 + g) + 4 * F0 ** 2 * (b ** 2 - a * g) + 4 * b * g * F0 + g ** 2
    return F0 * num / den if den != 0.0 else math.inf


def reciprocal_oracle(z, prof):
    """1/F from u'' = 2 beta + 6 gamma u, u(0) = 1/F0, u'(0) = S/F0.

    (u')^2 = alpha + 4 beta u + 6 gamma u^2 follows from the quartic ODE with
    u = 1/F; differentiating makes it linear. S/F0 encodes F'(0) = -F0 S.
    """
    with mpmath.workdps(50):
        a, b, g, F0, z = (mpmath.mpf(v) for v in (prof.alpha, prof.beta, prof.gamma, prof.F0, z))
        s = mpmath.sqrt(a * F0 ** 2 + 4 * b * F0 + 6 * g)
        if g == 0:
            terms = (1 / F0, s / F0 * z, b * z * z)
        else:
            lam = mpmath.sqrt(6 * abs(g))
            shift = -b / (3 * g)
            even, odd = (mpmath.cosh, mpmath.sinh) if g > 0 else (mpmath.cos, mpmath.sin)
            terms = (shift, (1 / F0 - shift) * even(lam * z), s / (F0 * lam) * odd(lam * z))
        return float(sum(terms)), float(sum(abs(t) for t in terms))


def rk4_reference(prof, z_end):
    """Intensity at z_end from F'' = Q'(F)/2 with F'(0) = -sqrt(Q(F0))."""
    a, b, g = prof.alpha, prof.beta, prof.gamma
    sol = solve_ivp(
        lambda z, y: [y[1], 2 * a * y[0] ** 3 + 6 * b * y[0] ** 2 + 6 * g * y[0]],
        (0, z_end),
        [prof.F0, -math.sqrt(prof.quartic(prof.F0))],
        method="DOP853",
        rtol=1e-12,
        atol=1e-14,
    )
    return sol.y[0, -1]


profiles = st.builds(
    lambda a, b, g, F0: (a, b, g, F0),
    st.floats(-2, 2),
    st.floats(-2, 2),
    st.one_of(st.floats(-2, -0.01), st.floats(0.01, 2), st.just(0.0)),
    st.floats(0.05, 5),
)


# -- intensity -------------------------------------------------------------------


def test_starts_at_F0(periodic_profile, kink_profile, spiky_profile):
    for prof in (periodic_profile, kink_profile, spiky_profile):
        assert intensity(1e-4, prof) == pytest.approx(prof.F0, rel=1e-3)
        assert intensity(0.0, prof) == prof.F0
        # first-order behaviour F0 (1 - S z)
        z = 1e-6
        assert intensity(z, prof) == pytest.approx(prof.F0 * (1 - prof.slope_root * z), rel=1e-10)


def test_periodic_value_at_one(periodic_profile):
    F = intensity(1.0, periodic_profile)
    assert 1.17157 <= F <= 6.82843
    assert F == pytest.approx(rk4_reference(periodic_profile, 1.0), rel=1e-10)


def test_periodic_return(periodic_profile):
    assert intensity(math.pi * math.sqrt(2), periodic_profile) == pytest.approx(4.0, abs=1e-9)


@settings(max_examples=300, deadline=None)
@given(profiles, st.floats(-6, 6))
def test_matches_literal_closed_form(coeffs, z):
    a, b, g, F0 = coeffs
    assume(a * F0 ** 2 + 4 * b * F0 + 6 * g > 1e-6)
    prof = make_profile(a, b, g, F0)
    assume(not wp_eval(z, prof.invariants, pole_tol=1e-3).at_pole)
    ref = literal_intensity(z, prof)
    den, scale = denominator(z, prof)
    assume(abs(den) > 1e-3 * scale and abs(ref) < 1e6)
    # the literal form itself cancels catastrophically where F is small
    assert intensity(z, prof) == pytest.approx(ref, rel=1e-8, abs=1e-9 * F0)


@settings(max_examples=300, deadline=None)
@given(profiles, st.floats(-30, 30))
def test_matches_reciprocal_oracle(coeffs, z):
    a, b, g, F0 = coeffs
    assume(a * F0 ** 2 + 4 * b * F0 + 6 * g > 1e-6)
    prof = make_profile(a, b, g, F0)
    u, scale = reciprocal_oracle(z, prof)
    # next to a pole 1/F is a small difference of large terms: ill-conditioned
    assume(math.isfinite(u) and abs(u) > 1e-6 * scale and abs(u) < 1e12)
    F = intensity(z, prof)
    assert F is not None
    assert F == pytest.approx(1 / u, rel=1e-8)


def test_relative_precision_in_decaying_tail(kink_profile):
    for z in (5.0, 10.0, 20.0, 40.0):
        ref = 1 / reciprocal_oracle(z, kink_profile)[0]
        assert intensity(z, kink_profile) == pytest.approx(ref, rel=1e-12)


def test_derivative_matches_differences(periodic_profile, kink_profile, spiky_profile):
    for prof in (periodic_profile, kink_profile, spiky_profile):
        for z in (-2.3, -0.4, 0.3, 1.1, 3.7):
            if intensity(z, prof) is None or abs(intensity(z, prof)) > 1e3:
                continue
            h = 1e-5
            fd = (intensity(z + h, prof) - intensity(z - h, prof)) / (2 * h)
            assert intensity_derivative(z, prof) == pytest.approx(fd, rel=1e-6, abs=1e-9)


def test_initial_slope_sign_and_parity(periodic_profile):
    prof = periodic_profile
    assert intensity_derivative(0.0, prof) == pytest.approx(-prof.F0 * prof.slope_root, rel=1e-12)
    # the odd P' term survives: F is even only when S = 0
    assert abs(intensity(0.5, prof) - intensity(-0.5, prof)) > 0.1
    at_root = make_profile(-0.25, 0.5, -1 / 3, 6.82842712474619, ansatz="A")
    assert at_root.slope_root == pytest.approx(0.0, abs=1e-6)
    assert intensity(0.5, at_root) == pytest.approx(intensity(-0.5, at_root), rel=1e-6)


def test_kink_form_matches_general(kink_profile):
    a, b = kink_profile.alpha, kink_profile.beta
    prof = dataclasses.replace(kink_profile, F0=-b / a)
    assert prof.is_kink
    assert -b / a == pytest.approx(1.5215, abs=1e-4)
    for z in (-3.0, -0.7, 0.5, 2.0, 6.0):
        assert intensity_kink(z, a, b) == pytest.approx(intensity(z, prof), rel=1e-10)
    assert intensity_kink(1e-9, a, b) == pytest.approx(-b / a, rel=1e-8)
    for far in (20.0, -20.0):
        step = far - math.copysign(1.0, far)
        assert abs(intensity_kink(far, a, b) - intensity_kink(step, a, b)) <= 1e-8
    # monotone front from the double root down to zero
    zs = np.linspace(-20, 20, 401)
    values = [intensity_kink(z, a, b) for z in zs]
    assert all(x > y for x, y in zip(values, values[1:]))
    assert values[0] == pytest.approx(-2 * b / a, rel=1e-6)


def test_kink_form_rejects_signs():
    with pytest.raises(InvalidProfile):
        intensity_kink(0.1, -1.0, -1.0)


# -- profile validation ---------------------------------------------------------------


@pytest.mark.parametrize(
    "kw",
    [
        {"F0": 0.0},
        {"F0": -1.0},
        {"F0": math.inf},
        {"ansatz": "C"},
        {"F0": 20.0},  # alpha F0^2 + 4 beta F0 + 6 gamma < 0
        {"g2": 1.0},
        {"d": None},
    ],
)
def test_invalid_profiles(periodic_profile, kw):
    with pytest.raises(InvalidProfile):
        dataclasses.replace(periodic_profile, **kw)


def test_case_b_needs_wavenumber_coefficients(kink_profile):
    with pytest.raises(InvalidProfile):
        dataclasses.replace(kink_profile, b1=None)


# -- poles ---------------------------------------------------------------------------


def _pole(prof, lo, hi):
    return brentq(lambda z: denominator(z, prof)[0], lo, hi, xtol=1e-15)


def test_spiky_profile_pole_and_removable_point(spiky_profile):
    # the denominator vanishes once on each side of z = 0; only the z < 0 zero is a pole
    z_pole = _pole(spiky_profile, -1.0, -0.05)
    for eps in (1e-6, 1e-8):
        assert abs(intensity(z_pole + eps, spiky_profile)) > 1e6
    z_fake = _pole(spiky_profile, 0.05, 1.0)
    left, mid, right = (intensity(z_fake + e, spiky_profile) for e in (-1e-6, 0.0, 1e-6))
    assert mid == pytest.approx(left, rel=1e-5) and mid == pytest.approx(right, rel=1e-5)
    ref = rk4_reference(spiky_profile, z_fake)
    assert mid == pytest.approx(ref, rel=1e-8)
    with pytest.raises(PoleHit):
        field(z_pole, 0.0, spiky_profile)


def test_phase_refuses_to_cross_pole(spiky_profile):
    assert math.isfinite(phase(2.0, spiky_profile))
    with pytest.raises(PhaseUndefined):
        phase(-2.0, spiky_profile)


# -- phase and tau --------------------------------------------------------------------


def test_phase_case_a_origin(periodic_profile):
    assert phase(0.0, periodic_profile) == pytest.approx(-0.5 * math.log(4), rel=1e-15)


def test_phase_linear_without_b1(kink_profile):
    prof = dataclasses.replace(kink_profile, F0=-kink_profile.beta / kink_profile.alpha, b1=0.0)
    for z in (-2.0, 0.7, 3.0):
        assert phase(z, prof) == pytest.approx(prof.b0 * z, rel=1e-14)


def test_phase_quadrature_derivative(kink_profile):
    z, h = 0.3, 1e-4
    fd = (phase(z + h, kink_profile) - phase(z - h, kink_profile)) / (2 * h)
    assert fd == pytest.approx(kink_profile.b0 + kink_profile.b1 * intensity(z, kink_profile), abs=1e-8)


def test_kink_phase_closed_form_derivative(kink_profile):
    prof = dataclasses.replace(kink_profile, F0=-kink_profile.beta / kink_profile.alpha)
    for z in (-1.5, 0.3, 2.5):
        h = 1e-5
        fd = (phase(z + h, prof) - phase(z - h, prof)) / (2 * h)
        assert fd == pytest.approx(tau(z, prof), abs=1e-8)


def test_phase_on_grid_matches_pointwise(kink_profile):
    zs = [-1.0, 2.0, 0.5, -0.25, 0.0]
    grid = phase_on_grid(zs, kink_profile)
    for z, ph in zip(zs, grid):
        assert ph == pytest.approx(phase(z, kink_profile), abs=1e-10)


def test_tau_examples(periodic_profile, kink_profile):
    b = kink_profile
    assert tau(0.0, b) == b.b0 + b.b1 * b.F0
    h = 1e-5
    fd = (phase(1 + h, periodic_profile) - phase(1 - h, periodic_profile)) / (2 * h)
    assert tau(1.0, periodic_profile) == pytest.approx(fd, abs=1e-6)
    # interior extremum of the periodic intensity
    z_ext = brentq(lambda z: intensity_derivative(z, periodic_profile), 1.0, 2.2)
    assert tau(z_ext, periodic_profile) == pytest.approx(0.0, abs=1e-12)


# -- field ---------------------------------------------------------------------------------


def test_field_origin(periodic_profile):
    s = field(0.0, 0.0, periodic_profile)
    ph = phase(0.0, periodic_profile)
    assert complex(s.psi_re, s.psi_im) == pytest.approx(2.0 * complex(math.cos(ph), math.sin(ph)), rel=1e-15)


def test_stationary_modulus(periodic_profile):
    xs = np.linspace(0.1, 4.0, 50)
    ts = np.linspace(0.0, 3.0, 50)
    for x in xs:
        mods = [math.hypot(field(x, t, periodic_profile).psi_re, field(x, t, periodic_profile).psi_im) for t in ts]
        assert max(mods) - min(mods) <= 1e-12 * max(mods)


def test_traveling_modulus(kink_profile):
    c = kink_profile.c
    for x, t, dt in [(0.3, 0.0, 0.5), (-1.0, 1.0, 1.7), (2.0, 0.4, -0.9)]:
        a = field(x, t, kink_profile)
        b = field(x + c * dt, t + dt, kink_profile)
        assert math.hypot(a.psi_re, a.psi_im) == pytest.approx(math.hypot(b.psi_re, b.psi_im), rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.floats(-4, 4), st.floats(0, 3))
def test_modulus_is_intensity(x, t):
    from qcgle.ansatz_a import solve_case_a
    from qcgle.params import QcgleParams
    from conftest import PERIODIC_SET

    prof = SolutionProfile.from_case_a(solve_case_a(QcgleParams(**PERIODIC_SET))[0], 4.0)
    s = field(x, t, prof)
    assert s.psi_re ** 2 + s.psi_im ** 2 == pytest.approx(s.F, rel=1e-12)
