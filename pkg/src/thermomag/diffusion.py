"""Single-particle momentum diffusion and the long-wavelength decoherence rate.

Thermal field fluctuations kick an induced magnetic dipole through the
field-gradient force (magnetic channel), through the m x dE/dt term (electric
channel) and through their cross term (coupled channel).  All three share
the same omega^8 |alpha|^2 (n^2+n) spectral integral and differ only by the
prefactors 1 : 3 : -2.  Material absorption adds an omega^5 channel.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .constants import C, HBAR, MU_0, thermal_wavenumber
from .errors import DomainError
from .materials import Material, Particle, cm_factors, cm_polarizability, dielectric_comparison_ratio
from .special import BoseWeight, bose_integral_quadrature, bose_reduced

PI = math.pi


class Method(str, enum.Enum):
    CLOSED_FORM = "closed"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class ThermalBath:
    temperature_T: float

    def __post_init__(self):
        if not self.temperature_T > 0:
            raise DomainError("bath temperature must be positive")


@dataclass(frozen=True)
class DiffusionBreakdown:
    """Contributions to <dp^2>/dt in kg^2 m^2 s^-3.  ``dp2_coupled`` is negative."""

    dp2_magnetic: float
    dp2_electric: float
    dp2_coupled: float
    dp2_absorption: float
    dp2_total: float

    @classmethod
    def from_channels(cls, magnetic: float, absorption: float) -> "DiffusionBreakdown":
        electric = 3.0 * magnetic
        coupled = -2.0 * magnetic + 0.0  # no negative zero for inert materials
        return cls(magnetic, electric, coupled, absorption,
                   magnetic + electric + coupled + absorption)


@dataclass(frozen=True)
class DecoherenceResult:
    lambda_scattering: float  # 1/(m^2 s)
    gamma: float              # 1/s
    delta_x: float            # m


def _magnetic_closed(mat, p, bath):
    q = thermal_wavenumber(bath.temperature_T)
    S = cm_factors(mat).scattering
    return HBAR**2 * p.radius_a**6 * C / (9 * PI**3) * S * q**9 * bose_reduced(8, BoseWeight.OCCUPATION_SQ_PLUS)


def _absorption_closed(mat, p, bath):
    q = thermal_wavenumber(bath.temperature_T)
    A = cm_factors(mat).absorption
    if A == 0:
        return 0.0
    return (HBAR**2 * p.radius_a**3 * C / (3 * PI**2 * p.beta) * A * q**6
            * bose_reduced(5, BoseWeight.OCCUPATION_SQ_PLUS))


def _magnetic_quadrature(mat, p, bath):
    pol = cm_polarizability(mat, p)
    if pol.alpha_sq == 0:
        return 0.0
    integral = bose_integral_quadrature(8, BoseWeight.OCCUPATION_SQ_PLUS, bath.temperature_T).value
    return MU_0**2 * HBAR**2 / (9 * PI**3 * C**8) * pol.alpha_sq * integral


def _absorption_quadrature(mat, p, bath):
    pol = cm_polarizability(mat, p)
    if pol.alpha_i_abs == 0:
        return 0.0
    integral = bose_integral_quadrature(5, BoseWeight.OCCUPATION_SQ_PLUS, bath.temperature_T).value
    # prefactor of the published closed form; the omega^5 integral form carries 4x this
    # (listed by `thermomag ledger`)
    return MU_0 * HBAR**2 / (3 * PI**2 * C**5 * p.beta) * pol.alpha_i_abs * integral


def diffusion_components(mat: Material, p: Particle, bath: ThermalBath,
                         method: Method = Method.CLOSED_FORM) -> DiffusionBreakdown:
    """Magnetic, electric, coupled and absorption contributions to <dp^2>/dt.

    The closed form uses Gamma(9) zeta(8) and Gamma(6) zeta(5); the quadrature
    path integrates omega^8 and omega^5 against n^2+n numerically.
    """
    method = Method(method)
    if method is Method.CLOSED_FORM:
        return DiffusionBreakdown.from_channels(_magnetic_closed(mat, p, bath), _absorption_closed(mat, p, bath))
    return DiffusionBreakdown.from_channels(_magnetic_quadrature(mat, p, bath), _absorption_quadrature(mat, p, bath))


def total_diffusion(mat: Material, p: Particle, bath: ThermalBath) -> float:
    """<dp^2>/dt: scattering term (a^6 T^9) plus absorption term (a^3 T^6 / beta)."""
    return 2.0 * _magnetic_closed(mat, p, bath) + _absorption_closed(mat, p, bath)


def decoherence_rate(mat: Material, p: Particle, bath: ThermalBath, delta_x: float,
                     method: Method = Method.CLOSED_FORM) -> DecoherenceResult:
    """Long-wavelength decoherence rate gamma = Lambda dx^2 with Lambda = <dp^2>/dt / (2 hbar^2).

    Validity needs delta_x * k_B T/(hbar c) << 1; see :func:`long_wavelength_parameter`.
    """
    if delta_x < 0:
        raise DomainError("superposition size must be non-negative")
    if Method(method) is Method.CLOSED_FORM:
        dp2 = total_diffusion(mat, p, bath)
    else:
        dp2 = diffusion_components(mat, p, bath, method).dp2_total
    lam = dp2 / (2.0 * HBAR**2)
    return DecoherenceResult(lambda_scattering=lam, gamma=lam * delta_x**2, delta_x=delta_x)


def diffusion_ratio_to_dielectric(mat: Material, epsilon_r: float) -> float:
    """gamma_B / gamma_E for a sphere with the same radius (chi_i ignored)."""
    return dielectric_comparison_ratio(mat.chi_r, epsilon_r)


def long_wavelength_parameter(length: float, T: float) -> float:
    """length * k_B T / (hbar c); the long-wavelength results assume this is << 1."""
    return length * thermal_wavenumber(T)
