"""Renormalized resolvent denominator in scaled units.

For scaled energy ``E`` and scaled electric field ``F`` the pole condition of
the impurity Green's function is ``D(E) = 0`` with

    D(E) = ln(E_B / E) + int_0^inf ds B(s),
    B(s) = exp(i E s) * [exp(i F^2 s (s cot s - 1)) / sin s - 1/s].

The overall factor ``m*/2pi`` is dropped. The time integral is taken along
the polyline ``0 -> -ih -> -ih + X``: the retarded prescription pushes the
zeros of ``sin s`` above the real axis, so the path may be lowered, and on
``Im s = -h`` the field factor decays like a Gaussian in ``Re s``.

The subtraction ``-1/s`` does not decay on the horizontal ray, so on that
piece it is integrated in closed form,

    int_{-ih}^{inf - ih} exp(i E s) / s ds = -gamma - ln(-E h) + Ein(-E h),

where ``Ein`` is the entire exponential integral and ``ln(-E)`` is continued
from the negative real axis through the upper half plane. With that, the
``Log E`` terms cancel and ``D`` is an entire function of ``E`` for ``F > 0``.
"""
from dataclasses import asdict, dataclass
from fractions import Fraction
import cmath
import math

import mpmath
import numpy as np
from scipy import integrate, special

from .errors import BranchDomain, DomainError, IllConditioned, NoConvergence, PoleProximity
from .quadrature import get_backend, integrate_panels
from .renorm_free import BRANCH, EULER_GAMMA

__all__ = [
    "ContourSpec",
    "KernelValue",
    "integrand_bracket",
    "field_integral",
    "field_integral_dE",
    "zero_field_integral",
    "denominator",
    "denominator_dE",
    "evaluate",
    "evaluate_grid",
    "calibrate_branch_constant",
    "truncation_point",
    "CONTOUR_TEST_SET",
]

_N_SERIES = 24

# (E, F) points used to check that results do not depend on the contour depth
CONTOUR_TEST_SET = (
    (1.0 + 0.5j, 0.5),
    (1.5 - 0.05j, 0.3),
    (2.2 + 0.2j, 1.0),
    (2.9 - 0.1j, 0.7),
    (3.4 + 0.0j, 0.05),
    (4.1 + 0.35j, 0.15),
    (4.8 - 0.01j, 0.13),
    (5.3 - 0.08j, 0.9),
    (5.7 + 0.1j, 0.4),
    (6.0 - 0.02j, 0.25),
)


def _series_coefficients():
    """Taylor coefficients of ``s cot s - 1`` and ``1/sin s - 1/s`` in powers of s^2."""
    q, r = [], []
    for k in range(1, _N_SERIES + 1):
        num, den = (int(v) for v in mpmath.bernfrac(2 * k))
        fact = math.factorial(2 * k)
        # s cot s - 1 = sum_k (-1)^k 4^k B_2k s^2k / (2k)!
        q.append(((-1) ** k * 4**k * num, den * fact))
        # 1/sin s - 1/s = sum_k (-1)^(k+1) 2 (2^(2k-1) - 1) B_2k s^(2k-1) / (2k)!
        r.append(((-1) ** (k + 1) * 2 * (2 ** (2 * k - 1) - 1) * num, den * fact))
    return q, r


_Q_FRAC, _R_FRAC = _series_coefficients()
_COEFFS = {}


def _coeffs(backend):
    if backend.name not in _COEFFS:
        if backend.ctx is None:
            conv = lambda nd: float(Fraction(*nd))  # noqa: E731
        else:
            conv = lambda nd: backend.ctx.mpf(nd[0]) / nd[1]  # noqa: E731
        _COEFFS[backend.name] = ([conv(c) for c in _Q_FRAC], [conv(c) for c in _R_FRAC])
    return _COEFFS[backend.name]


def _horner(coeffs, z):
    acc = coeffs[-1]
    for c in coeffs[-2::-1]:
        acc = acc * z + c
    return acc


@dataclass(frozen=True)
class ContourSpec:
    """Integration path and accuracy settings.

    Parameters
    ----------
    depth : float
        Imaginary drop ``h`` of the horizontal ray, ``0 < h < pi``.
    x_max : float or None
        Explicit truncation of the ray; ``None`` picks the shortest multiple
        of ``panel_len`` whose certified tail bound is below ``envelope_tol``.
    envelope_tol : float
    panel_len : float
        Initial panel length along the ray; with the default ``pi`` panel
        edges sit right below the zeros of ``sin s``.
    quad_rel_tol, quad_abs_tol : float
    series_radius : float
        Below this ``|s|`` the cancelling pieces use Taylor series.
    max_condition_error : float
        Largest tolerated rounding error ``eps * int |integrand|`` before
        :class:`IllConditioned` is raised.
    x_max_limit : float
    precision : {"double", "extended"}
    """

    depth: float = 0.5
    x_max: float = None
    envelope_tol: float = 1e-16
    panel_len: float = math.pi
    quad_rel_tol: float = 1e-13
    quad_abs_tol: float = 1e-14
    series_radius: float = 0.1
    max_condition_error: float = 1e-11
    x_max_limit: float = 1e5
    precision: str = "double"

    def __post_init__(self):
        if not 0 < self.depth < math.pi:
            raise DomainError(f"contour depth must lie in (0, pi), got {self.depth}")
        if not (0 < self.series_radius < 1 and self.series_radius < self.depth):
            raise DomainError("series_radius must satisfy 0 < s0 < min(1, depth)")
        if not self.panel_len > 0:
            raise DomainError("panel_len must be positive")
        if self.x_max is not None and not self.x_max > 0:
            raise DomainError("x_max must be positive")
        if self.precision not in ("double", "extended"):
            raise DomainError(f"precision must be 'double' or 'extended', got {self.precision!r}")

    def replace(self, **changes):
        fields = asdict(self)
        fields.update(changes)
        return ContourSpec(**fields)

    def summary(self):
        return asdict(self)


DEFAULT_CONTOUR = ContourSpec()


# ----------------------------------------------------------------------------
# integrand


def _q_and_r(s, backend, s0):
    """``s cot s - 1`` and ``1/sin s - 1/s`` with series near the origin."""
    qc, rc = _coeffs(backend)
    small = backend.abs(s) < s0
    if backend.ctx is None:
        s = np.asarray(s, dtype=complex)
    if not np.any(small):
        return s / backend.tan(s) - 1, 1 / backend.sin(s) - 1 / s, small
    s2 = s * s
    q_ser = s2 * _horner(qc, s2)
    r_ser = s * _horner(rc, s2)
    if np.all(small):
        return q_ser, r_ser, small
    safe = np.where(small, 1, s)
    q_dir = safe / backend.tan(safe) - 1
    r_dir = 1 / backend.sin(safe) - 1 / safe
    return np.where(small, q_ser, q_dir), np.where(small, r_ser, r_dir), small


def _bracket(s, f2, backend, s0):
    """``exp(i F^2 s q(s)) / sin s - 1/s`` (the part of B without exp(iEs))."""
    q, r, small = _q_and_r(s, backend, s0)
    a = 1j * f2 * s * q
    em1 = backend.expm1(a)
    if np.all(~small):
        return em1 / backend.sin(s) + r
    safe_a = np.where(a == 0, 1, a)
    exprel = np.where(a == 0, 1, em1 / safe_a)
    near = exprel * (1j * f2 * q) * (1 + s * r) + r
    if np.all(small):
        return near
    safe_s = np.where(small, 1, s)
    far = em1 / backend.sin(safe_s) + r
    return np.where(small, near, far)


def _kernel(s, f2, backend):
    """``exp(i F^2 (s^2 cot s - s)) / sin s`` for ``|s|`` away from the origin."""
    sin_s = backend.sin(s)
    a = 1j * f2 * (s * s * backend.cos(s) / sin_s - s)
    return backend.exp(a) / sin_s


def integrand_bracket(s, energy, efield, series_radius=0.1, precision="double"):
    """Integrand ``B(s)`` of the renormalized time integral.

    Only ``efield**2`` enters. For ``|s| < series_radius`` the cancelling
    pieces ``s cot s - 1`` and ``1/sin s - 1/s`` are summed from their Taylor
    series. Raises :class:`PoleProximity` within ``1e-8`` of ``n pi``, ``n >= 1``.
    """
    backend = get_backend(precision)
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    n = np.round(s_arr.real / math.pi)
    if np.any((n >= 1) & (np.abs(s_arr - n * math.pi) < 1e-8)):
        raise PoleProximity("s is within 1e-8 of a zero of sin s")
    sb = backend.num(s_arr)
    f2 = backend.real(float(efield) ** 2)
    e = backend.num(complex(energy))
    out = backend.exp(1j * e * sb) * _bracket(sb, f2, backend, series_radius)
    out = backend.to_complex(out) if backend.ctx is not None else out
    return out[0] if np.ndim(s) == 0 else out


# ----------------------------------------------------------------------------
# truncation


def _envelope_log(x, a, b, f2, h, with_s):
    """Log of an upper bound of the ray integrand at ``s = x - ih``."""
    ci = math.tanh(h) if x >= h else 1.0 / math.tanh(h)
    val = a * h - b * x - f2 * ((x * x - h * h) * ci - 2 * x * h / math.sinh(2 * h) + h) - math.log(math.sinh(h))
    if with_s:
        val += math.log(x + h)
    return val


def _tail_bound(x, a, b, f2, h, with_s):
    slope = -b - 2 * f2 * math.tanh(h) * x + 2 * f2 * h / math.sinh(2 * h)
    if with_s:
        slope += 1.0 / (x + h)
    if x < h or slope >= 0:
        return math.inf
    return math.exp(_envelope_log(x, a, b, f2, h, with_s)) / -slope


def truncation_point(energy, efield, contour=DEFAULT_CONTOUR, with_derivative=True):
    """Length ``X`` of the horizontal ray with a certified tail below ``envelope_tol``."""
    if contour.x_max is not None:
        return contour.x_max
    a, b = energy.real, energy.imag
    f2 = efield * efield
    h, step = contour.depth, contour.panel_len
    eta = contour.envelope_tol

    def ok(k):
        return _tail_bound(k * step, a, b, f2, h, with_derivative) < eta

    k = 1
    while not ok(k):
        k *= 2
        if k * step > contour.x_max_limit:
            raise NoConvergence(f"tail bound not met before x_max_limit={contour.x_max_limit}")
    lo = k // 2
    while k - lo > 1:
        mid = (k + lo) // 2
        if ok(mid):
            k = mid
        else:
            lo = mid
    return k * step


# ----------------------------------------------------------------------------
# contour integral


@dataclass
class KernelValue:
    """Result of one contour evaluation.

    ``value`` and ``derivative`` are the log-free part
    ``P(E) = V + H + gamma + ln h - Ein(-E h)`` and its E-derivative, where
    ``V`` and ``H`` are the vertical and horizontal path integrals.
    """

    value: np.ndarray
    derivative: np.ndarray
    error: float
    rounding: float
    x_max: float
    n_eval: int


def _ein(z, backend):
    """Entire exponential integral ``Ein(z) = int_0^z (1 - e^-t)/t dt``."""
    if backend.ctx is None:
        z = complex(z)
        if z.imag == 0 and z.real < 0:
            x = -z.real
            return complex(-(special.expi(x) - EULER_GAMMA - math.log(x)))
        if abs(z) < 1e-3:
            return z - z * z / 4 + z**3 / 18 - z**4 / 96
        return complex(special.exp1(z) + EULER_GAMMA + cmath.log(z))
    ctx = backend.ctx
    z = ctx.mpc(z)
    if z.imag == 0 and z.real < 0:
        x = -z.real
        return ctx.mpc(-(ctx.ei(x) - ctx.euler - ctx.log(x)))
    if abs(z) < ctx.mpf("1e-3"):
        return ctx.nsum(lambda k: (-1) ** (k + 1) * z**k / (k * ctx.factorial(k)), [1, ctx.inf])
    return ctx.e1(z) + ctx.euler + ctx.log(z)


def _contour_parts(energies, efield, contour, derivative=True):
    energies = np.atleast_1d(np.asarray(energies, dtype=complex))
    backend = get_backend(contour.precision)
    h = contour.depth
    f2 = float(efield) ** 2
    if efield == 0 and np.any(energies.imag <= 0):
        raise DomainError("zero-field contour integral needs Im E > 0")
    x_max = max(truncation_point(e, float(efield), contour, derivative) for e in energies)

    hb = backend.real(h)
    f2b = backend.real(f2)
    eb = backend.num(energies)
    m = energies.size
    s0 = contour.series_radius

    def vertical(y):
        s = -1j * y
        br = _bracket(s, f2b, backend, s0)
        ph = backend.exp(1j * np.multiply.outer(eb, s))
        val = -1j * ph * br
        if not derivative:
            return val
        return np.concatenate([val, 1j * s * val])

    def horizontal(x):
        s = x - 1j * hb
        kern = _kernel(s, f2b, backend)
        ph = backend.exp(1j * np.multiply.outer(eb, s))
        val = ph * kern
        if not derivative:
            return val
        return np.concatenate([val, 1j * s * val])

    # relative rounding of one sample: a few ulps plus the size of the
    # arguments fed to exp, sin and cos
    e_abs = np.abs(energies)[:, None]
    reps = 2 if derivative else 1

    def noise(s_abs, expo):
        rel = backend.eps * (8.0 + e_abs * s_abs[None, :] + expo[None, :])
        return np.tile(rel, (reps, 1))

    def vertical_noise(y):
        y = np.asarray(y, dtype=float)
        return noise(y, f2 * y * y)

    def horizontal_noise(x):
        x = np.asarray(x, dtype=float)
        r2 = x * x + h * h
        return noise(np.sqrt(r2), x + f2 * r2 * np.abs(1.0 / np.tan(x - 1j * h)))

    tol = contour.quad_abs_tol / 2
    n_vert = max(1, math.ceil(h / 0.5))
    v = integrate_panels(vertical, np.linspace(0.0, h, n_vert + 1), backend, tol, contour.quad_rel_tol, vertical_noise)
    n_hor = max(1, round(x_max / contour.panel_len))
    hr = integrate_panels(
        horizontal, np.linspace(0.0, x_max, n_hor + 1), backend, tol, contour.quad_rel_tol, horizontal_noise
    )

    total = v.value + hr.value
    # conditioning is judged on D itself, not on its derivative
    err = float(np.max((v.error + hr.error)[:m]))
    rounding = float(np.max((v.rounding + hr.rounding)[:m]))
    if rounding > contour.max_condition_error:
        raise IllConditioned(
            f"cancellation error ~{rounding:.2e} exceeds {contour.max_condition_error:.1e} "
            f"(depth={h}, precision={contour.precision})"
        )

    const = backend.real(EULER_GAMMA) + (math.log(h) if backend.ctx is None else backend.ctx.log(hb))
    values = np.empty(m, dtype=complex)
    derivs = np.empty(m, dtype=complex)
    for j in range(m):
        e = eb[j]
        values[j] = complex(total[j] + const - _ein(-e * hb, backend))
        if derivative:
            z = e * hb
            if abs(complex(z)) < 1e-8:
                corr = hb * (1 + z / 2)
            else:
                corr = backend.expm1(np.array([z], dtype=backend.dtype))[0] / e
            derivs[j] = complex(total[m + j] + corr)
    return KernelValue(values, derivs if derivative else None, err, rounding, x_max, v.n_eval + hr.n_eval)


# ----------------------------------------------------------------------------
# zero field, real energy below the first Landau level


def _inv_sinh_minus_inv(y):
    if y < 0.1:
        y2 = y * y
        return y * (-1 / 6 + y2 * (7 / 360 + y2 * (-31 / 15120 + y2 * (127 / 604800 - y2 * 73 / 3421440))))
    return 1.0 / math.sinh(y) - 1.0 / y


def _j_integral(energy):
    """``J(E) = int_0^inf [exp(E y)/sinh y - exp(-y)/y] dy`` for real ``E < 1``."""

    def near(y):
        return math.exp(energy * y) * _inv_sinh_minus_inv(y) + (math.expm1(energy * y) - math.expm1(-y)) / y

    def far(y):
        return 2 * math.exp(-(1 - energy) * y) / -math.expm1(-2 * y) - math.exp(-y) / y

    a, ea = integrate.quad(near, 0, 1, epsabs=1e-15, epsrel=1e-13, limit=200)
    b, eb = integrate.quad(far, 1, np.inf, epsabs=1e-15, epsrel=1e-13, limit=400)
    return a + b, ea + eb


def _j_derivative(energy):
    def f(y):
        if y < 1e-8:
            return 1.0
        return y * 2 * math.exp(-(1 - energy) * y) / -math.expm1(-2 * y)

    val, _ = integrate.quad(f, 0, np.inf, epsabs=1e-15, epsrel=1e-13, limit=400)
    return val


def zero_field_integral(energy):
    """Time integral at zero electric field for real ``E < 1``.

    Obtained by rotating the path onto the negative imaginary axis. For
    ``E < 0`` the result ``int_0^inf e^{E y} (1/sinh y - 1/y) dy`` is real.
    For ``0 < E < 1`` the ``1/y`` piece no longer converges on its own; its
    retarded continuation adds ``-i pi`` and the value is returned as complex.
    """
    energy = float(energy)
    if energy >= 1:
        raise DomainError("zero-field integral requires E < 1")
    if energy == 0:
        raise DomainError("zero-field integral is singular at E = 0")
    j, _ = _j_integral(energy)
    if energy < 0:
        return j + math.log(-energy)
    return complex(j + math.log(energy), -math.pi)


def calibrate_branch_constant(binding=-1.0, energies=(0.25, 0.5, 0.75), tol=1e-10):
    """Pick the constant ``c`` in ``ln(-E_B) - Log E + c`` that keeps D real in the gap.

    Candidates are ``0`` and ``+-i pi``; the check uses zero field and real
    ``0 < E < 1`` where the retarded denominator must be real.
    """
    hits = []
    for c in (0.0, 1j * math.pi, -1j * math.pi):
        worst = max(
            abs((math.log(-binding) - cmath.log(e) + c + zero_field_integral(e)).imag) for e in energies
        )
        if worst < tol:
            hits.append(c)
    if len(hits) != 1:
        raise NoConvergence(f"branch calibration ambiguous: {hits}")
    return hits[0]


# ----------------------------------------------------------------------------
# public evaluation


def _efield_binding(params):
    return float(params.efield_tilde), float(params.binding_tilde)


def _zero_field_real(energy, binding, derivative):
    j, _ = _j_integral(energy)
    val = complex(math.log(-binding) + j)
    return val, (complex(_j_derivative(energy)) if derivative else None)


def evaluate(energy, params, contour=DEFAULT_CONTOUR, derivative=True):
    """Denominator and (optionally) its derivative at one energy.

    Returns ``(D, dD/dE, info)`` where ``info`` is a :class:`KernelValue`
    (``None`` on the zero-field real-axis path).
    """
    energy = complex(energy)
    efield, binding = _efield_binding(params)
    if efield == 0 and energy.imag == 0:
        if not energy.real < 1:
            raise DomainError("zero field with Re E >= 1 on the real axis is not supported")
        d, dd = _zero_field_real(energy.real, binding, derivative)
        return d, dd, None
    kv = _contour_parts([energy], efield, contour, derivative)
    # ln(-E_B) - Log E + c + [P + Log E - i pi]; Log E cancels exactly
    d = math.log(-binding) + (BRANCH - 1j * math.pi) + kv.value[0]
    dd = kv.derivative[0] if derivative else None
    return d, dd, kv


def evaluate_grid(energies, params, contour=DEFAULT_CONTOUR):
    """Denominator on an array of energies sharing one set of quadrature panels."""
    energies = np.asarray(energies, dtype=complex)
    efield, binding = _efield_binding(params)
    if efield == 0:
        raise DomainError("grid evaluation needs a nonzero field")
    kv = _contour_parts(energies.ravel(), efield, contour, derivative=False)
    d = math.log(-binding) + (BRANCH - 1j * math.pi) + kv.value
    return d.reshape(energies.shape)


def _check_sector(energy):
    if energy == 0:
        raise BranchDomain("E = 0")
    if energy.real < 0 and energy.imag < 0:
        raise BranchDomain("Log E branch is not fixed in the third quadrant")


def field_integral(energy, efield, contour=DEFAULT_CONTOUR):
    """The time integral ``int_0^inf B(s) ds`` continued to the resonance sheet.

    Defined for ``F > 0`` (or ``F = 0`` with ``Im E > 0``) and ``arg E`` in
    ``(-pi/2, pi]``. The result is even in ``F``.
    """
    energy = complex(energy)
    _check_sector(energy)
    if efield == 0 and energy.imag == 0:
        return complex(zero_field_integral(energy.real))
    kv = _contour_parts([energy], abs(float(efield)), contour, derivative=False)
    return kv.value[0] + cmath.log(energy) - 1j * math.pi


def field_integral_dE(energy, efield, contour=DEFAULT_CONTOUR):
    energy = complex(energy)
    _check_sector(energy)
    if efield == 0 and energy.imag == 0:
        if not energy.real < 1:
            raise DomainError("requires E < 1")
        return complex(_j_derivative(energy.real) + 1 / energy.real)
    kv = _contour_parts([energy], abs(float(efield)), contour, derivative=True)
    return kv.derivative[0] + 1 / energy


def denominator(energy, params, contour=DEFAULT_CONTOUR):
    """Scaled denominator ``D(E) = ln(-E_B) - Log E + c + I(E)`` with ``c = i pi``.

    Zeros are bound states (real) and resonances (``Im E < 0``).
    """
    return evaluate(energy, params, contour, derivative=False)[0]


def denominator_dE(energy, params, contour=DEFAULT_CONTOUR):
    """``dD/dE = -1/E + dI/dE``."""
    return evaluate(energy, params, contour, derivative=True)[1]
