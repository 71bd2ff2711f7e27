"""Zero-range interaction for a free particle in one, two and three dimensions.

In two dimensions the renormalized coupling ``lambda_R`` together with the
arbitrary time scale ``t0`` only ever enters through the bound-state energy
``E_B``; everything downstream is parametrized by ``E_B`` alone.
"""
from dataclasses import dataclass
import cmath
import math

from .errors import BranchDomain, DomainError, InvalidCoupling, NoBoundState

__all__ = [
    "EULER_GAMMA",
    "RenormParams2D",
    "RenormParams3D",
    "bound_energy_2d",
    "denominator_2d_free",
    "denominator_3d_free",
    "bound_energy_3d",
    "coupling_1d",
    "denominator_1d_free",
]

EULER_GAMMA = 0.5772156649015329

# Additive constant in ln(E_B/E) = ln(-E_B) - Log(E) + BRANCH, fixed by the
# retarded prescription; see resolvent_kernel.calibrate_branch_constant.
BRANCH = 1j * math.pi


@dataclass(frozen=True)
class RenormParams2D:
    lambda_r: float
    m_star: float = 1.0
    t0: float = 1.0

    def __post_init__(self):
        if not self.t0 > 0:
            raise DomainError("t0 must be positive")
        if not self.m_star > 0:
            raise DomainError("m_star must be positive")


@dataclass(frozen=True)
class RenormParams3D:
    lambda_r: float
    m_star: float = 1.0

    def __post_init__(self):
        if not self.m_star > 0:
            raise DomainError("m_star must be positive")


def bound_energy_2d(p):
    """Bound-state energy ``-exp(-gamma + 2 pi/(lambda_R m*)) / t0``.

    Negative for either sign of ``lambda_R``. Exact zero coupling is rejected
    (the limits from the two sides differ: ``0^-`` and ``-inf``).
    """
    if p.lambda_r == 0 or not math.isfinite(p.lambda_r):
        raise InvalidCoupling("lambda_r must be finite and nonzero")
    return -math.exp(-EULER_GAMMA + 2.0 * math.pi / (p.lambda_r * p.m_star)) / p.t0


def denominator_2d_free(energy, e_binding, m_star=1.0):
    """Free 2D denominator ``(m*/2pi) ln(E_B/E)`` on the retarded sheet.

    The logarithm is written as ``ln(-E_B) - Log(E) + i pi`` with ``Log``
    principal, which is real for ``E < 0`` and continues through the upper
    half plane onto the positive axis. Defined for ``arg E`` in ``(-pi/2, pi]``.
    """
    energy = complex(energy)
    if energy == 0:
        raise DomainError("D(E) is singular at E = 0")
    if not e_binding < 0:
        raise DomainError("e_binding must be negative")
    arg = cmath.phase(energy)
    if not -math.pi / 2 < arg <= math.pi:
        raise BranchDomain(f"arg(E) = {arg:.6g} outside (-pi/2, pi]")
    return m_star / (2.0 * math.pi) * (math.log(-e_binding) - cmath.log(energy) + BRANCH)


def denominator_3d_free(energy, lambda_r, m_star=1.0):
    """``1/lambda_R + (m*/2pi) sqrt(-2 m* E)`` for ``E <= 0``."""
    if energy > 0:
        raise DomainError("3D denominator is only provided for E <= 0")
    return 1.0 / lambda_r + m_star / (2.0 * math.pi) * math.sqrt(-2.0 * m_star * energy)


def bound_energy_3d(lambda_r, m_star=1.0):
    if not lambda_r < 0:
        raise NoBoundState("a 3D bound state needs lambda_r < 0")
    return -2.0 * math.pi**2 / (m_star**3 * lambda_r**2)


def coupling_1d(e_binding, m_star=1.0):
    """1D coupling ``-sqrt(2|E_B|/m*)`` (bare and renormalized coincide)."""
    if not e_binding < 0:
        raise DomainError("e_binding must be negative")
    return -math.sqrt(2.0 * abs(e_binding) / m_star)


def denominator_1d_free(energy, coupling, m_star=1.0):
    """``1/lambda + m*/sqrt(-2 m* E)`` for ``E < 0``."""
    if not energy < 0:
        raise DomainError("1D denominator is only provided for E < 0")
    if coupling == 0:
        raise InvalidCoupling("coupling must be nonzero")
    return 1.0 / coupling + m_star / math.sqrt(-2.0 * m_star * energy)
