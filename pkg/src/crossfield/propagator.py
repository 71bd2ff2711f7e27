"""Free crossed-field Green's function at general arguments and the full
impurity Green's function built from it.

Positions are in units of ``1/sqrt(m* omega)``, energies and fields in the
scaled units of :mod:`crossfield.scaling`. Green's functions are returned in
units of ``m*/2pi``; multiply by ``m*/(2pi)`` to restore the physical
normalization. In these units the full Green's function reads

    G(r, r') = G0(r, r') + G0(r, 0) G0(0, r') / D(E)

with ``D`` the scaled denominator of :mod:`crossfield.resolvent_kernel`, so
its poles are exactly the zeros of ``D``.

The free function is the time integral (symmetric gauge, ``s = omega t/2``)

    G0 = -int_0^inf ds exp(i E s + Phi(s)) / sin s,
    Phi = (i/4)|r - r'|^2 cot s + (i/2)(x y' - x' y) + i F s (x + x')
          + i F (s cot s - 1)(y' - y) + i F^2 s (s cot s - 1),

taken on the same lowered contour as the denominator.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import CoincidentPoints, DomainError, NoConvergence, OnPole
from .quadrature import get_backend, integrate_panels
from .resolvent_kernel import DEFAULT_CONTOUR, _envelope_log, _check_sector, evaluate

__all__ = ["Position2D", "ORIGIN", "free_integrand", "greens_free_crossed", "greens_full", "pole_residue"]


@dataclass(frozen=True)
class Position2D:
    """Point in the plane, scaled lengths."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DomainError("position components must be finite")

    @classmethod
    def of(cls, r):
        return r if isinstance(r, Position2D) else cls(float(r[0]), float(r[1]))


ORIGIN = Position2D(0.0, 0.0)


def free_integrand(s, r, r_prime, energy, efield):
    """Integrand of ``G0`` (including the overall minus sign) at complex ``s``."""
    r, rp = Position2D.of(r), Position2D.of(r_prime)
    s = np.asarray(s, dtype=complex)
    return _integrand(s, r, rp, complex(energy), float(efield))


def _integrand(s, r, rp, energy, f):
    cot = np.cos(s) / np.sin(s)
    d2 = (r.x - rp.x) ** 2 + (r.y - rp.y) ** 2
    q = s * cot - 1
    phi = (
        0.25j * d2 * cot
        + 0.5j * (r.x * rp.y - rp.x * r.y)
        + 1j * f * s * (r.x + rp.x)
        + 1j * f * q * (rp.y - r.y)
        + 1j * f * f * s * q
    )
    return -np.exp(1j * energy * s + phi) / np.sin(s)


def _ray_cutoff(r, rp, energy, f, contour):
    """Ray length with an upper bound on the remaining tail below ``envelope_tol``."""
    if contour.x_max is not None:
        return contour.x_max
    a, b = energy.real, energy.imag
    h = contour.depth
    f2 = f * f
    dy = abs(rp.y - r.y)
    coth = 1.0 / math.tanh(h)
    shift = f * h * (r.x + rp.x) + f * dy * h / math.sinh(2 * h)

    def bound(x):
        if x < h:
            return math.inf
        slope = -b - 2 * f2 * math.tanh(h) * x + 2 * f2 * h / math.sinh(2 * h) + f * dy * coth
        if slope >= 0:
            return math.inf
        env = _envelope_log(x, a, b, f2, h, False) + shift + f * dy * x * coth
        return math.exp(min(env, 700.0)) / -slope

    k = 1
    while bound(k * contour.panel_len) >= contour.envelope_tol:
        k += max(1, k // 4)
        if k * contour.panel_len > contour.x_max_limit:
            raise NoConvergence("tail bound not met before x_max_limit")
    return k * contour.panel_len


def greens_free_crossed(r, r_prime, energy, efield, contour=DEFAULT_CONTOUR):
    """Free crossed-field Green's function in units of ``m*/2pi``.

    Parameters
    ----------
    r, r_prime : Position2D or (x, y)
    energy : complex
        Scaled energy; any value off the third quadrant.
    efield : float
        Scaled field, strictly positive.
    contour : ContourSpec
        Only double precision is supported here.

    Raises
    ------
    CoincidentPoints
        For ``r == r_prime``, where the integral diverges logarithmically at
        ``s = 0``.
    """
    r, rp = Position2D.of(r), Position2D.of(r_prime)
    energy = complex(energy)
    f = float(efield)
    if not f > 0:
        raise DomainError("the crossed-field Green's function needs efield > 0")
    _check_sector(energy)
    if r == rp:
        raise CoincidentPoints("G0 diverges at coincident arguments")
    backend = get_backend("double")
    h = contour.depth
    x_max = _ray_cutoff(r, rp, energy, f, contour)

    def vertical(y):
        return (-1j * _integrand(-1j * y, r, rp, energy, f))[None, :]

    def horizontal(x):
        return _integrand(x - 1j * h, r, rp, energy, f)[None, :]

    tol = contour.quad_abs_tol / 2
    v = integrate_panels(vertical, np.linspace(0.0, h, max(1, math.ceil(h / 0.5)) + 1), backend, tol, contour.quad_rel_tol)
    n_hor = max(1, round(x_max / contour.panel_len))
    hr = integrate_panels(horizontal, np.linspace(0.0, x_max, n_hor + 1), backend, tol, contour.quad_rel_tol)
    return complex(v.value[0] + hr.value[0])


def greens_full(r, r_prime, energy, params, contour=DEFAULT_CONTOUR):
    """Full impurity Green's function in units of ``m*/2pi``.

    Raises
    ------
    OnPole
        If ``|D(E)| < 1e-13``.
    CoincidentPoints
        If ``r == r_prime`` or either point sits on the impurity. The
        impurity-point limit of a contact interaction is not finite.
    """
    r, rp = Position2D.of(r), Position2D.of(r_prime)
    if r == ORIGIN or rp == ORIGIN:
        raise CoincidentPoints("the full Green's function diverges at the impurity site")
    d, _, _ = evaluate(complex(energy), params, contour, derivative=False)
    if abs(d) < 1e-13:
        raise OnPole(f"|D(E)| = {abs(d):.2e} at E = {energy}")
    g0 = greens_free_crossed(r, rp, energy, params.efield_tilde, contour)
    g_r0 = greens_free_crossed(r, ORIGIN, energy, params.efield_tilde, contour)
    g_0r = greens_free_crossed(ORIGIN, rp, energy, params.efield_tilde, contour)
    return g0 + g_r0 * g_0r / d


def pole_residue(r, r_prime, pole, params, contour=DEFAULT_CONTOUR):
    """Residue of the full Green's function at a simple zero ``pole`` of D."""
    r, rp = Position2D.of(r), Position2D.of(r_prime)
    _, dd, _ = evaluate(complex(pole), params, contour)
    g_r0 = greens_free_crossed(r, ORIGIN, pole, params.efield_tilde, contour)
    g_0r = greens_free_crossed(ORIGIN, rp, pole, params.efield_tilde, contour)
    return g_r0 * g_0r / dd
