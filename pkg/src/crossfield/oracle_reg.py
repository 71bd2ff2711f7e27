"""Independent check of the contour pipeline through the regularized problem.

With a Gaussian smearing of width ``sigma`` of the contact interaction and a
convergence factor ``exp(-eps s)``, the time integral of the denominator is
absolutely convergent on the real ``s`` axis for ``Im E > 0``. In scaled
units, with ``kappa = m* omega sigma^2``,

    R(E) = int_0^inf ds exp(i E s - eps s) exp(F^2 N(s) / Delta(s)) / Delta(s),
    Delta = sin s - i kappa cos s,
    N = i s^2 cos s - i s sin s + kappa s cos s - kappa (s^2 + 1) sin s.

``N/Delta`` is the field exponent ``i s (s cot s - 1)`` plus its
``sigma^2`` correction, combined over a common denominator so that the
singularities at ``s = n pi`` cancel. ``R`` diverges like ``-ln kappa``, but
the divergence does not depend on ``E``, so ``R(E1) - R(E2)`` tends to
``D(E1) - D(E2)``. The leading corrections are ``kappa ln kappa``,
``kappa``, ``kappa^2 ln kappa`` and ``kappa^2``; these are removed by a
least-squares fit over a sequence of regulators.

Nothing here shares code with :mod:`crossfield.resolvent_kernel` or
:mod:`crossfield.quadrature`: the integrals use QUADPACK through
:func:`scipy.integrate.quad` on the real axis.
"""
from dataclasses import dataclass, field
import cmath
import math
import warnings

import numpy as np
from scipy import integrate

from .errors import DomainError, ExtrapolationUnstable, NoConvergence

__all__ = [
    "Regulator",
    "OracleEstimate",
    "DEFAULT_KAPPAS",
    "default_regulators",
    "regularized_integral",
    "difference_estimate",
    "denominator_difference",
]

DEFAULT_KAPPAS = (4e-3, 2e-3, 1e-3, 5e-4, 2.5e-4)

MIN_IMAG = 0.2


@dataclass(frozen=True)
class Regulator:
    """Smearing ``kappa = m* omega sigma^2`` and convergence factor ``eps``."""

    kappa: float
    eps: float

    def __post_init__(self):
        if not 0 < self.kappa < 0.1:
            raise DomainError(f"kappa must lie in (0, 0.1), got {self.kappa}")
        if not self.eps > 0:
            raise DomainError(f"eps must be positive, got {self.eps}")


def default_regulators(kappas=DEFAULT_KAPPAS):
    """Regulators with ``eps = kappa**2``.

    Since ``eps`` only shifts ``E`` by ``i eps``, its effect is absorbed by
    the ``kappa^2`` term of the extrapolation.
    """
    return [Regulator(k, k * k) for k in kappas]


def _integrand(s, energy, f2, kappa, eps):
    c, sn = math.cos(s), math.sin(s)
    delta = complex(sn, -kappa * c)
    num = complex(kappa * s * c - kappa * (s * s + 1) * sn, s * s * c - s * sn)
    return cmath.exp(1j * energy * s - eps * s + f2 * num / delta) / delta


def _breakpoints(x_max, kappa, ratio):
    """Panel edges graded geometrically towards every multiple of pi."""
    edges = [0.0]
    n = math.ceil(x_max / math.pi)
    for j in range(n):
        a0, a1 = j * math.pi, (j + 1) * math.pi
        pts = []
        u = kappa
        while u < math.pi / 2:
            pts += [a0 + u, a1 - u]
            u *= ratio
        edges += sorted(pts) + [a1]
    return edges


def regularized_integral(energy, efield, reg, *, ratio=2.0, rel_tol=1e-12, envelope_tol=1e-16):
    """Real-axis integral ``R(E)`` of the regularized denominator.

    Parameters
    ----------
    energy : complex
        Scaled energy with ``Im E >= 0.2``.
    efield : float
        Scaled field; only its square enters.
    reg : Regulator
    ratio, rel_tol : float
        Grading ratio of the panels around ``n pi`` and QUADPACK relative
        tolerance. Different values give independent adaptive schedules.
    envelope_tol : float
        Truncation where ``exp(-(Im E + eps) s)`` falls below this value.

    Raises
    ------
    NoConvergence
        If the summed QUADPACK error estimates exceed ``1e-10``.
    """
    energy = complex(energy)
    if energy.imag < MIN_IMAG:
        raise DomainError(f"the oracle needs Im E >= {MIN_IMAG}, got {energy.imag}")
    if ratio <= 1:
        raise DomainError("grading ratio must exceed 1")
    f2 = float(efield) ** 2
    decay = energy.imag + reg.eps
    x_max = math.log(1.0 / envelope_tol) / decay
    edges = _breakpoints(x_max, reg.kappa, ratio)

    def func(s):
        return _integrand(s, energy, f2, reg.kappa, reg.eps)

    total, err = 0j, 0.0
    with warnings.catch_warnings():
        # roundoff notices at the tolerance limit; the error sum is checked below
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for a, b in zip(edges[:-1], edges[1:]):
            val, e = integrate.quad(func, a, b, complex_func=True, epsabs=1e-16, epsrel=rel_tol, limit=1000)
            total += val
            err += abs(e)
    if err > 1e-10:
        raise NoConvergence(f"regularized integral error estimate {err:.2e} too large")
    return total


@dataclass
class OracleEstimate:
    """Extrapolated difference with the data behind it."""

    value: complex
    kappas: list
    raw: list
    model: str
    terms: int
    spread: float = 0.0
    extra: dict = field(default_factory=dict)


_MODEL_TERMS = (
    ("1", lambda k: np.ones_like(k)),
    ("kappa ln kappa", lambda k: k * np.log(k)),
    ("kappa", lambda k: k),
    ("kappa^2 ln kappa", lambda k: k * k * np.log(k)),
    ("kappa^2", lambda k: k * k),
)


def _fit(kappas, values, n_terms):
    k = np.asarray(kappas, dtype=float)
    a = np.stack([fn(k) for _, fn in _MODEL_TERMS[:n_terms]], axis=1).astype(complex)
    coef = np.linalg.lstsq(a, np.asarray(values, dtype=complex), rcond=None)[0]
    return complex(coef[0])


def difference_estimate(e1, e2, efield, regulators=None, *, ratio=2.0, rel_tol=1e-12):
    """Extrapolated ``D(e1) - D(e2)`` with raw data and model metadata.

    The raw differences must shrink their successive gaps (Cauchy check).
    The model uses as many terms of ``1, kappa ln kappa, kappa,
    kappa^2 ln kappa, kappa^2`` as there are regulators (at most five).
    ``spread`` is the change of the limit when the highest term is dropped.

    Raises
    ------
    ExtrapolationUnstable
        When the raw sequence is not contracting or dropping the top term
        moves the limit by more than ``1e-3``.
    """
    regs = sorted(regulators or default_regulators(), key=lambda r: -r.kappa)
    if len(regs) < 2:
        raise DomainError("at least two regulators are needed")
    if complex(e1) == complex(e2):
        return OracleEstimate(0j, [r.kappa for r in regs], [0j] * len(regs), "identity", 0)
    raw = []
    for reg in regs:
        a = regularized_integral(e1, efield, reg, ratio=ratio, rel_tol=rel_tol)
        b = regularized_integral(e2, efield, reg, ratio=ratio, rel_tol=rel_tol)
        raw.append(a - b)
    kappas = [r.kappa for r in regs]
    gaps = np.abs(np.diff(raw))
    if np.any(gaps[1:] >= gaps[:-1]):
        raise ExtrapolationUnstable(f"raw differences are not contracting: gaps {gaps}")
    n_terms = min(len(raw), len(_MODEL_TERMS))
    value = _fit(kappas, raw, n_terms)
    spread = abs(value - _fit(kappas, raw, n_terms - 1)) if n_terms > 1 else math.inf
    if spread > 1e-3:
        raise ExtrapolationUnstable(f"extrapolated limit moves by {spread:.2e} between model orders")
    model = " + ".join(name for name, _ in _MODEL_TERMS[:n_terms])
    return OracleEstimate(value, kappas, raw, model, n_terms, spread)


def denominator_difference(e1, e2, efield, regulators=None, **kwargs):
    """``D(e1) - D(e2)`` from the regularized problem, extrapolated to zero smearing."""
    return difference_estimate(e1, e2, efield, regulators, **kwargs).value
