import math

import pytest
from hypothesis import given, strategies as st

from crossfield.errors import BranchDomain, DomainError, InvalidCoupling, NoBoundState
from crossfield.renorm_free import (
    EULER_GAMMA,
    RenormParams2D,
    bound_energy_2d,
    bound_energy_3d,
    coupling_1d,
    denominator_1d_free,
    denominator_2d_free,
    denominator_3d_free,
)

couplings = st.floats(0.05, 50).flatmap(lambda a: st.sampled_from([a, -a]))


def test_euler_gamma():
    assert EULER_GAMMA == pytest.approx(0.57721566490153286, abs=1e-16)


def test_bound_energy_2d_value():
    # lambda_R = 2 pi: -exp(1 - gamma)
    assert bound_energy_2d(RenormParams2D(2 * math.pi)) == pytest.approx(-math.exp(1 - EULER_GAMMA), rel=1e-15)


@given(couplings, st.floats(0.2, 5), st.floats(0.1, 10))
def test_bound_energy_2d_negative_and_zero(lam, m, t0):
    p = RenormParams2D(lam, m, t0)
    eb = bound_energy_2d(p)
    if eb == 0.0:
        return  # underflow for strongly attractive coupling
    assert eb < 0
    if math.isfinite(eb):
        assert abs(denominator_2d_free(eb, eb, m)) <= 1e-12


def test_zero_coupling_rejected():
    with pytest.raises(InvalidCoupling):
        bound_energy_2d(RenormParams2D(0.0))


@given(st.floats(-50, -0.05), st.floats(0.2, 5))
def test_bound_energy_3d_zeroes_denominator(lam, m):
    eb = bound_energy_3d(lam, m)
    assert eb < 0
    assert abs(denominator_3d_free(eb, lam, m)) <= 1e-12 * (1 + abs(1 / lam))


def test_no_3d_bound_state_for_repulsion():
    with pytest.raises(NoBoundState):
        bound_energy_3d(1.0)


@given(st.floats(-100, -1e-3), st.floats(0.1, 10))
def test_coupling_1d_exact(eb, m):
    lam = coupling_1d(eb, m)
    assert lam < 0
    assert lam == -math.sqrt(2 * abs(eb) / m)
    assert abs(denominator_1d_free(eb, lam, m)) <= 1e-12 * m / math.sqrt(2 * m * abs(eb))


def test_2d_denominator_real_below_zero_and_retarded_above():
    eb = -2.0
    assert denominator_2d_free(-0.5, eb).imag == 0.0
    # on the positive axis the retarded log has Im = +pi m/(2 pi) = 1/2
    assert denominator_2d_free(3.0, eb).imag == pytest.approx(0.5, abs=1e-15)


def test_2d_denominator_branch_domain():
    with pytest.raises(BranchDomain):
        denominator_2d_free(-1 - 1j, -1.0)
    with pytest.raises(DomainError):
        denominator_2d_free(0.0, -1.0)


def test_3d_and_1d_domains():
    with pytest.raises(DomainError):
        denominator_3d_free(0.5, -1.0)
    with pytest.raises(DomainError):
        denominator_1d_free(0.5, -1.0)
    with pytest.raises(DomainError):
        coupling_1d(1.0)
