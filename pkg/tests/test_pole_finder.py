import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from crossfield.errors import DomainError, IllConditioned, LeftDomain, NotDecaying
from crossfield.pole_finder import (
    RESOLUTION_FLOOR,
    WIDTH_REL_ACCURACY,
    RootResult,
    Trajectory,
    TrajectoryPoint,
    default_field_nodes,
    detect_stabilization,
    field_nodes,
    lifetime_curve,
    newton_solve,
    seed_candidates,
    seed_ground,
    seed_window,
    solve_zero_field,
    trace_trajectory,
)
from crossfield.resolvent_kernel import ContourSpec, denominator
from crossfield.scaling import ScaledParams


def digamma_root(binding):
    """Zero-field bound state from ln(-E_B/2) = psi((1-E)/2), E < 1."""
    f = lambda e: mpmath.log(-binding / 2) - mpmath.digamma((1 - e) / 2)
    return float(mpmath.findroot(f, (binding - 1, min(binding + 1, 0.999)), solver="anderson"))


# frozen from the digamma relation with mpmath at 15 digits
ZERO_FIELD_ROOTS = {-6.4: -6.374230308401319, -50.0: -49.99666726612975}


@pytest.mark.parametrize("binding", [-0.3, -2.8, -6.4, -50.0])
def test_zero_field_root(binding):
    root = solve_zero_field(binding)
    assert root.pole.imag == 0
    assert root.residual < 1e-12
    assert root.pole.real == pytest.approx(digamma_root(binding), abs=1e-11)
    if binding in ZERO_FIELD_ROOTS:
        assert root.pole.real == pytest.approx(ZERO_FIELD_ROOTS[binding], abs=1e-11)


def test_zero_field_root_lies_between_binding_and_first_level():
    for eb in (-0.01, -1.0, -10.0):
        e = solve_zero_field(eb).pole.real
        assert eb < e < 1


def test_newton_zero_field_ignores_guess():
    assert newton_solve(ScaledParams(0.0, -6.4), guess=4.0).pole == solve_zero_field(-6.4).pole


@pytest.mark.parametrize(
    "binding,efield,guess,re_ref,im_ref",
    [(-6.4, 0.132, 4.8 - 0.01j, 4.83, -0.111e-10), (-2.8, 0.163, 3.0 - 0.01j, 3.0266, -0.398e-11)],
)
def test_reference_resonances(binding, efield, guess, re_ref, im_ref):
    root = newton_solve(ScaledParams(efield, binding), guess=guess)
    assert root.residual < 1e-12
    assert root.pole.real == pytest.approx(re_ref, abs=5e-3)
    assert root.pole.imag == pytest.approx(im_ref, rel=0.02)
    assert not root.below_resolution


def test_root_is_zero_of_denominator():
    p = ScaledParams(0.3, -6.4)
    root = newton_solve(p, guess=4.7 - 0.008j)
    assert abs(denominator(root.pole, p)) < 1e-12
    assert root.uncertainty < 1e-13
    # Newton from a nearby guess converges to the same root
    again = newton_solve(p, guess=root.pole + 2e-3 - 1e-3j)
    assert abs(again.pole - root.pole) < 1e-12


def test_escalation_to_extended_precision():
    # a narrow resonance, so the relative width exemption does not apply
    p = ScaledParams(0.132, -6.4)
    strict = ContourSpec(max_condition_error=1e-16)
    with pytest.raises(IllConditioned):
        newton_solve(p, strict, 4.83 - 1e-9j, escalate=False)
    root = newton_solve(p, strict, 4.83 - 1e-9j)
    assert root.precision == "extended"
    assert abs(root.pole - newton_solve(p, guess=4.83 - 1e-9j).pole) < 1e-12


def test_wide_resonance_stays_in_double():
    p = ScaledParams(0.3, -6.4)
    root = newton_solve(p, ContourSpec(max_condition_error=1e-16), 4.7 - 0.008j)
    assert root.precision == "double"
    assert root.uncertainty <= WIDTH_REL_ACCURACY * abs(root.pole.imag)


def test_newton_guards():
    p = ScaledParams(0.3, -6.4)
    with pytest.raises(DomainError):
        newton_solve(p)
    with pytest.raises(LeftDomain):
        newton_solve(p, guess=complex(2e3, 0))


def test_root_result_resolution():
    r = RootResult(4.8 - 1e-15j, 0.0, 1, 1 + 0j, 1e-16)
    assert r.floor == RESOLUTION_FLOOR["double"]
    assert r.below_resolution
    assert r.im_resolved == -1e-13
    r2 = RootResult(4.8 - 1e-9j, 0.0, 1, 1 + 0j, 1e-16)
    assert r2.im_resolved == -1e-9


def test_seed_window_clipping():
    lo_re, hi_re, im_lo, im_hi = seed_window(2)
    assert lo_re < 5 < hi_re and im_lo == -0.3 and im_hi == 0
    assert seed_window(2, 0.01)[2] > -0.3
    assert seed_window(1, 1.0)[2] == -0.3


def test_seed_candidates_find_reference_pole():
    p = ScaledParams(0.132, -6.4)
    cands = seed_candidates(p, window=(4.6, 5.1, -0.05, 0.0), grid=(20, 8))
    assert len(cands) >= 1
    best = min((newton_solve(p, guess=c) for c in cands[:3]), key=lambda r: abs(r.pole.imag))
    assert best.pole.real == pytest.approx(4.8307, abs=1e-3)


def test_seed_ground_continues_bound_state():
    root = seed_ground(ScaledParams(0.2, -2.8))
    z = solve_zero_field(-2.8).pole
    assert abs(root.pole - z) < 0.05
    assert root.pole.imag <= root.floor


@given(st.floats(0, 3), st.floats(0.01, 3), st.floats(1e-3, 0.5))
def test_field_nodes_properties(a, width, step):
    b = a + width
    fwd = field_nodes(a, b, step)
    rev = field_nodes(b, a, step)
    assert fwd[0] == a and fwd[-1] == pytest.approx(b)
    assert np.all(np.diff(fwd) <= step * (1 + 1e-9))
    assert np.array_equal(fwd, rev[::-1])


def test_default_field_nodes():
    nodes = default_field_nodes(0.01, 3.1)
    d = np.diff(nodes)
    assert nodes[0] == 0.01 and nodes[-1] == pytest.approx(3.1)
    assert d[nodes[:-1] < 0.49].max() <= 0.002 + 1e-12
    assert d.max() <= 0.02 + 1e-12
    assert 0.5 in nodes


def test_trace_is_continuous_and_deterministic():
    p = ScaledParams(0.12, -6.4)
    seed = newton_solve(p, guess=4.84 - 1e-6j)
    grid = np.linspace(0.12, 0.145, 11)
    a = trace_trajectory(-6.4, grid, seed)
    b = trace_trajectory(-6.4, grid, seed)
    assert len(a) == 11
    assert np.array_equal(a.poles, b.poles)
    assert np.max(np.abs(np.diff(a.poles))) < 0.01
    events = detect_stabilization(a)
    assert len(events) == 1
    assert events[0].efield_star == pytest.approx(0.132, abs=5e-3)


def _synthetic(ims, fs=None):
    fs = np.linspace(0.1, 0.2, len(ims)) if fs is None else fs
    pts = [TrajectoryPoint(float(f), RootResult(complex(5.0, im), 0.0, 1, 1 + 0j, 0.0)) for f, im in zip(fs, ims)]
    return Trajectory(-1.0, pts)


def test_detect_single_dip():
    ims = -np.array([1e-3, 1e-4, 1e-6, 1e-9, 1e-6, 1e-4, 1e-3])
    ev = detect_stabilization(_synthetic(ims), refine=False)
    assert len(ev) == 1
    assert ev[0].efield_star == pytest.approx(0.15)
    assert ev[0].tau_scaled == pytest.approx(1e9)
    assert ev[0].dip_depth_decades == pytest.approx(6)


def test_shallow_dip_and_monotone_curve_ignored():
    shallow = -np.array([1e-3, 5e-4, 2e-4, 1e-4, 2e-4, 5e-4, 1e-3])
    assert detect_stabilization(_synthetic(shallow), refine=False) == []
    mono = -np.logspace(-9, -2, 8)
    assert detect_stabilization(_synthetic(mono), refine=False) == []


def test_dip_below_resolution_is_clamped():
    ims = -np.array([1e-3, 1e-5, 1e-8, 1e-16, 1e-8, 1e-5, 1e-3])
    ev = detect_stabilization(_synthetic(ims), refine=False)
    assert len(ev) == 1 and ev[0].below_resolution
    assert ev[0].pole_star.imag == -RESOLUTION_FLOOR["double"]


def test_lifetime_curve():
    ims = -np.array([1e-3, 1e-6, 1e-4])
    fs, taus, re = lifetime_curve(_synthetic(ims))
    assert np.allclose(taus, [1e3, 1e6, 1e4])
    assert np.all(re == 5.0)
    with pytest.raises(NotDecaying):
        lifetime_curve(_synthetic(np.array([1e-3])))


@pytest.fixture(scope="module")
def short_branch():
    seed = newton_solve(ScaledParams(0.3, -6.4), guess=4.7 - 0.008j)
    return trace_trajectory(-6.4, np.linspace(0.3, 0.34, 9), seed)


def test_reversed_sweep_visits_same_poles(short_branch):
    last = short_branch.points[-1].root
    back = trace_trajectory(-6.4, np.linspace(0.34, 0.3, 9), last)
    assert np.max(np.abs(back.poles - short_branch.poles)) < 1e-8
    assert np.all(np.diff(back.efields) > 0)


def test_halved_step_changes_nothing(short_branch):
    fine = trace_trajectory(-6.4, np.linspace(0.3, 0.34, 17), short_branch.points[0].root)
    assert np.max(np.abs(fine.poles[::2] - short_branch.poles)) < 1e-8


def test_points_reverify_on_other_contour(short_branch):
    other = ContourSpec(depth=1.0)
    for p in short_branch.points[::4]:
        assert abs(denominator(p.pole, ScaledParams(p.efield, -6.4), other)) <= 1e-11


def test_seed_candidates_second_level():
    cands = seed_candidates(ScaledParams(0.05, -2.8), landau_index=1, grid=(30, 12))
    assert any(abs(c.real - 3.0) < 0.3 for c in cands)


def test_degenerate_window():
    from crossfield.errors import EmptyWindow

    with pytest.raises(EmptyWindow):
        seed_candidates(ScaledParams(0.1, -6.4), window=(4.5, 4.5, -0.1, 0.0))


def test_lifetime_at_reference_field():
    root = newton_solve(ScaledParams(0.132, -6.4), guess=4.8 - 0.01j)
    traj = Trajectory(-6.4, [TrajectoryPoint(0.132, root)])
    _, taus, _ = lifetime_curve(traj)
    assert taus[0] == pytest.approx(9.0e10, rel=0.02)


def test_steep_branch_converges_in_double():
    # |dD/dE| ~ 4e3: rounding is above 1e-11 but the width is known to 1e-8
    root = newton_solve(ScaledParams(1.04, -6.4), guess=2.52 - 4.96j)
    assert root.precision == "double"
    assert root.pole == pytest.approx(2.520961 - 4.958455j, abs=1e-6)
    assert root.uncertainty <= WIDTH_REL_ACCURACY * abs(root.pole.imag)


@pytest.mark.slow
def test_residual_floor_on_steep_branch():
    # |dD/dE| ~ 1.5e5, so no double E reaches |D| <= 1e-11
    extended = ContourSpec(precision="extended")
    root = newton_solve(ScaledParams(1.4, -6.4), extended, 0.343118 - 9.723843j)
    assert root.residual > 1e-11
    assert root.residual <= 4 * np.finfo(float).eps * abs(root.pole) * abs(root.derivative)
    assert root.pole == pytest.approx(0.3431177705353372 - 9.723843478188748j, abs=1e-12)
