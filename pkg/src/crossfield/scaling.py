"""Physical <-> dimensionless conversions (hbar = 1).

Lengths are measured in units of ``1/sqrt(m* omega)``, energies in units of
``omega/2`` and the electric field in units of ``sqrt(m* omega**3)/|e|``.
Every other module works in these scaled variables only.
"""
from dataclasses import dataclass
import math

from .errors import DomainError, NotDecaying, ZeroField

__all__ = [
    "PhysicalParams",
    "ScaledParams",
    "cyclotron_frequency",
    "to_scaled",
    "from_scaled",
    "landau_level_scaled",
    "lifetime_from_pole",
]


@dataclass(frozen=True)
class PhysicalParams:
    """Effective mass, charge magnitude and the two (scalar) fields."""

    m_star: float
    charge_mag: float
    b_field: float
    e_field: float = 0.0

    def __post_init__(self):
        if not self.m_star > 0:
            raise DomainError(f"m_star must be positive, got {self.m_star}")
        if not self.charge_mag > 0:
            raise DomainError(f"charge_mag must be positive, got {self.charge_mag}")


@dataclass(frozen=True)
class ScaledParams:
    """Scaled electric field and scaled bound-state energy of the impurity."""

    efield_tilde: float
    binding_tilde: float

    def __post_init__(self):
        if not self.efield_tilde >= 0:
            raise DomainError(f"efield_tilde must be >= 0, got {self.efield_tilde}")
        if not self.binding_tilde < 0:
            raise DomainError(f"binding_tilde must be < 0, got {self.binding_tilde}")

    def with_field(self, efield_tilde):
        return ScaledParams(float(efield_tilde), self.binding_tilde)


def cyclotron_frequency(p):
    """``omega = |e| B / m*`` (always returned positive)."""
    if p.b_field == 0:
        raise ZeroField("cyclotron frequency vanishes for b_field = 0")
    return p.charge_mag * abs(p.b_field) / p.m_star


def to_scaled(p, energy):
    """Return ``(E_tilde, efield_tilde)`` for a physical energy and ``p``.

    ``energy`` may be complex (a resonance energy).
    """
    omega = cyclotron_frequency(p)
    e_tilde = 2.0 * energy / omega
    f_tilde = p.charge_mag * p.e_field / math.sqrt(p.m_star * omega**3)
    return e_tilde, f_tilde


def from_scaled(p, e_tilde, efield_tilde):
    """Inverse of :func:`to_scaled`: ``(energy, e_field)`` for ``p``'s B and m*."""
    omega = cyclotron_frequency(p)
    energy = 0.5 * omega * e_tilde
    e_field = efield_tilde * math.sqrt(p.m_star * omega**3) / p.charge_mag
    return energy, e_field


def landau_level_scaled(n):
    """Scaled energy ``2n + 1`` of the n-th Landau level."""
    if n < 0:
        raise DomainError(f"Landau index must be >= 0, got {n}")
    return 2 * n + 1


def lifetime_from_pole(pole, omega=1.0):
    """Decay time of a resonance at scaled energy ``pole``.

    Returns
    -------
    (tau_scaled, tau_physical)
        ``tau_scaled = -1/Im(pole)`` is in units of ``1/omega``;
        ``tau_physical = tau_scaled / omega``.
    """
    im = complex(pole).imag
    if im >= 0:
        raise NotDecaying(f"Im(pole) = {im} >= 0: state does not decay")
    if not omega > 0:
        raise DomainError("omega must be positive")
    tau = -1.0 / im
    return tau, tau / omega
