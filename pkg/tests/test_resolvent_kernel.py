import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crossfield.errors import BranchDomain, DomainError, IllConditioned, PoleProximity
from crossfield.resolvent_kernel import (
    BRANCH,
    CONTOUR_TEST_SET,
    ContourSpec,
    calibrate_branch_constant,
    denominator,
    denominator_dE,
    evaluate,
    evaluate_grid,
    field_integral,
    field_integral_dE,
    integrand_bracket,
    truncation_point,
    zero_field_integral,
)
from crossfield.scaling import ScaledParams

# int_0^inf B(s) ds from a 40-digit mpmath quadrature on a contour of depth
# 0.7 (checked against depth 1.1), with the -1/s ray piece done through E1
MPMATH_FIELD_INTEGRAL = {
    (2.5 + 0.3j, 0.4): -0.7593517257242568 - 0.12219763202918606j,
    (1.0 + 0.5j, 0.5): 0.5279362772228597 + 0.13815920056154307j,
    (4.2 + 0.2j, 0.9): -0.06787990938110716 - 0.6304701816542252j,
    (0.5 + 0.25j, 0.15): 1.984839106699899 - 0.534980898664977j,
}


def digamma_denominator(energy, binding):
    return complex(mpmath.log(-binding / 2) - mpmath.digamma((1 - mpmath.mpc(energy)) / 2))


def test_branch_constant():
    assert calibrate_branch_constant() == BRANCH == 1j * math.pi


@pytest.mark.parametrize("key", sorted(MPMATH_FIELD_INTEGRAL, key=lambda k: k[1]))
def test_field_integral_against_mpmath(key):
    e, f = key
    assert abs(field_integral(e, f) - MPMATH_FIELD_INTEGRAL[key]) < 1e-13


def test_field_integral_even_in_field():
    assert field_integral(3 + 0.1j, -0.4) == field_integral(3 + 0.1j, 0.4)


@pytest.mark.parametrize("energy", [0.5 + 0.3j, 3.2 + 0.4j, -2 + 0.2j, 5.5 + 1j, 2.0 + 0.01j])
def test_zero_field_digamma(energy):
    d = denominator(energy, ScaledParams(0.0, -2.0))
    assert abs(d - digamma_denominator(energy, -2.0)) < 1e-10


@given(st.floats(-20, 0.95).filter(lambda e: abs(e) > 1e-3), st.floats(-30, -0.1))
@settings(max_examples=30)
def test_zero_field_real_in_gap(energy, binding):
    d = denominator(energy, ScaledParams(0.0, binding))
    assert d.imag == 0
    assert abs(d - digamma_denominator(energy, binding)) < 1e-9 * (1 + abs(d))


def test_zero_field_integral_domain():
    assert isinstance(zero_field_integral(-0.5), float)
    assert zero_field_integral(0.5).imag == pytest.approx(-math.pi)
    with pytest.raises(DomainError):
        zero_field_integral(1.5)
    with pytest.raises(DomainError):
        zero_field_integral(0.0)


def test_small_field_approaches_zero_field():
    # the leading field correction is of order F^2
    e = 3.2 + 0.4j
    d0 = digamma_denominator(e, -2.0)
    gaps = [abs(denominator(e, ScaledParams(f, -2.0)) - d0) for f in (2e-3, 1e-3, 5e-4)]
    assert gaps[2] < 1e-4
    assert gaps[0] / gaps[1] == pytest.approx(4, rel=0.01)
    assert gaps[1] / gaps[2] == pytest.approx(4, rel=0.01)


@pytest.mark.parametrize("energy,efield", CONTOUR_TEST_SET)
def test_contour_depth_independence(energy, efield):
    a = field_integral(energy, efield)
    for h in (0.3, 1.0):
        b = field_integral(energy, efield, ContourSpec(depth=h))
        assert abs(a - b) <= 1e-11 * (1 + abs(a))


def test_test_set_spans_required_region():
    es = np.array([e for e, _ in CONTOUR_TEST_SET])
    fs = np.array([f for _, f in CONTOUR_TEST_SET])
    assert len(CONTOUR_TEST_SET) == 10
    assert es.real.min() <= 1.0 and es.real.max() >= 6.0
    assert es.imag.min() <= -0.1 and es.imag.max() >= 0.5
    assert fs.min() <= 0.05 and fs.max() >= 1.0


def test_extended_precision_agrees():
    e, f = 4.8 - 0.01j, 0.2
    a = field_integral(e, f)
    b = field_integral(e, f, ContourSpec(precision="extended"))
    assert abs(a - b) < 1e-12


@pytest.mark.parametrize("energy,efield", [(4.8 - 0.01j, 0.2), (3.03 - 1e-3j, 0.163), (1 + 0.5j, 0.5), (6 - 0.2j, 1.0)])
def test_derivative_against_differences(energy, efield):
    p = ScaledParams(efield, -2.8)
    d = 1e-5
    fd = (denominator(energy + d, p) - denominator(energy - d, p)) / (2 * d)
    fdi = (denominator(energy + 1j * d, p) - denominator(energy - 1j * d, p)) / (2j * d)
    dd = denominator_dE(energy, p)
    assert abs(fd - dd) < 1e-6
    assert abs(fdi - dd) < 1e-6  # analytic: Cauchy-Riemann


def test_field_integral_derivative_consistent():
    e, f = 2.5 + 0.3j, 0.4
    p = ScaledParams(f, -1.0)
    assert abs(field_integral_dE(e, f) - (denominator_dE(e, p) + 1 / e)) < 1e-12


def test_grid_matches_pointwise():
    p = ScaledParams(0.3, -6.4)
    es = np.array([[4.5 - 0.1j, 5.0 + 0.2j], [4.9 - 0.01j, 3.0 + 0j]])
    g = evaluate_grid(es, p)
    assert g.shape == es.shape
    for e, v in zip(es.ravel(), g.ravel()):
        assert abs(v - denominator(e, p)) < 1e-12


def test_denominator_entire_across_negative_axis():
    # no Log E branch cut survives for F > 0
    p = ScaledParams(0.5, -1.0)
    above = denominator(-2 + 1e-9j, p)
    below = denominator(-2 - 1e-9j, p)
    assert abs(above - below) < 1e-7


def test_evaluate_info():
    d, dd, kv = evaluate(4.8 - 0.01j, ScaledParams(0.2, -6.4))
    assert kv.error < 1e-11
    assert kv.rounding < 1e-11
    assert kv.x_max > 0


def test_ill_conditioned_deep_contour():
    with pytest.raises(IllConditioned):
        denominator(5.0 - 0.01j, ScaledParams(0.1, -6.4), ContourSpec(depth=3.0))


def test_sector_and_domain_errors():
    with pytest.raises(BranchDomain):
        field_integral(-1 - 1j, 0.3)
    with pytest.raises(BranchDomain):
        field_integral(0j, 0.3)
    with pytest.raises(DomainError):
        ContourSpec(depth=4.0)
    with pytest.raises(DomainError):
        ContourSpec(precision="quad")
    with pytest.raises(DomainError):
        denominator(1.5, ScaledParams(0.0, -1.0))


def test_integrand_bracket_series_continuity():
    e, f = 2 + 0.1j, 0.5
    inside = integrand_bracket(0.0999999 - 0.01j, e, f)
    outside = integrand_bracket(0.1000001 - 0.01j, e, f)
    assert abs(inside - outside) < 1e-6
    # B(s) -> finite limit at s = 0
    assert np.isfinite(integrand_bracket(0j, e, f))


def test_integrand_bracket_extended():
    s = np.array([0.05 - 0.2j, 1.3 - 0.5j, 7.0 - 0.5j])
    a = integrand_bracket(s, 4 - 0.1j, 0.3)
    b = integrand_bracket(s, 4 - 0.1j, 0.3, precision="extended")
    assert np.max(np.abs(a - b)) < 1e-13


def test_integrand_pole_proximity():
    with pytest.raises(PoleProximity):
        integrand_bracket(math.pi + 1e-10, 2.0, 0.3)


def test_truncation_point_tail():
    x = truncation_point(5 - 0.01j, 0.2)
    assert x % math.pi == pytest.approx(0, abs=1e-9) or x % math.pi == pytest.approx(math.pi, abs=1e-9)
    assert truncation_point(5 - 0.01j, 1.0) < x
    assert truncation_point(5 - 0.01j, 0.2, ContourSpec(x_max=42.0)) == 42.0


def test_bracket_small_s_leading_term():
    # B(s) ~ s/6 at zero field
    assert integrand_bracket(1e-3, 2.0, 0.0) == pytest.approx(1e-3 / 6 * np.exp(2e-3j), rel=1e-6)
    with pytest.raises(PoleProximity):
        integrand_bracket(math.pi, 2.0, 0.0)


@pytest.mark.parametrize("efield", [0.0, 0.3, 1.0])
def test_bracket_series_on_switch_circle(efield):
    # the Taylor branch is used just inside |s| = s0; compare with 40 digits
    e = 2.5 - 0.1j
    zs = 0.0999999 * np.exp(2j * np.pi * np.arange(12) / 12)
    got = integrand_bracket(zs, e, efield)
    with mpmath.workdps(40):
        f2 = mpmath.mpf(efield) ** 2
        for z, g in zip(zs, got):
            s = mpmath.mpc(z)
            ref = mpmath.exp(1j * e * s) * (mpmath.exp(1j * f2 * s * (s * mpmath.cot(s) - 1)) / mpmath.sin(s) - 1 / s)
            assert abs(g - complex(ref)) <= 1e-14 * abs(complex(ref))


def test_zero_field_integral_monotone():
    vals = [zero_field_integral(e) for e in np.linspace(-20, -0.05, 12)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_zero_field_integral_is_rotated_form():
    from scipy import integrate

    for e in (-50.0, -2.0, -0.3):
        def f(y):
            if y < 1e-6:
                return -y / 6
            return math.exp(e * y) * (2 * math.exp(-y) / -math.expm1(-2 * y) - 1 / y)

        ref, _ = integrate.quad(f, 0, np.inf, epsabs=1e-14, limit=400)
        assert abs(zero_field_integral(e) - ref) < 1e-10
        if e == -50.0:
            assert abs(ref) < 1e-3


def test_small_field_limit_on_real_axis():
    # Richardson in F^2 from F = 0.02 and 0.01 recovers the zero-field value
    i1 = field_integral(-2.0 + 0j, 0.02)
    i2 = field_integral(-2.0 + 0j, 0.01)
    extrap = (4 * i2 - i1) / 3
    assert abs(extrap - zero_field_integral(-2.0)) < 1e-6


@pytest.mark.parametrize("energy", [-5.0, -1.0, 0.5])
def test_gap_reality(energy):
    assert denominator(energy, ScaledParams(0.0, -2.8)).imag == 0.0


def test_derivative_nonzero_at_reference_root():
    from crossfield.pole_finder import newton_solve

    p = ScaledParams(0.163, -2.8)
    root = newton_solve(p, guess=3.0 - 0.01j)
    assert abs(denominator_dE(root.pole, p)) > 0.1
