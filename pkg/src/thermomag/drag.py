"""Einstein-Hopf drag on an induced magnetic dipole moving through thermal radiation.

To first order in v/c the dipole feels F = -xi m v with

    xi = (mu_0 hbar / 3 pi^2 m c^5) |int omega^5 alpha_I(omega) dn/domega domega|

where alpha_I is the extinction-side imaginary polarizability (radiative
plus absorptive).  The two channels scale as a^6 T^8 and a^3 T^5.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import C, HBAR, MU_0, thermal_wavenumber
from .diffusion import Method, ThermalBath
from .materials import Material, Particle, cm_factors, cm_polarizability, dielectric_comparison_ratio, dielectric_factor
from .special import BoseWeight, bose_integral_quadrature, bose_reduced

PI = math.pi

# coefficient of (a^6 hbar beta / m) (k_B T/hbar c)^8 S
SCATTERING_COEFFICIENT = 32.0 * PI**5 / 135.0
# coefficient of (a^3 hbar / m) (k_B T/hbar c)^5 A; equals Gamma(6) zeta(5) / (3 pi^2)
ABSORPTION_COEFFICIENT = bose_reduced(5, BoseWeight.OCCUPATION_SQ_PLUS) / (3.0 * PI**2)
PRINTED_ABSORPTION_COEFFICIENT = 41.47


@dataclass(frozen=True)
class DragResult:
    xi_scattering: float  # 1/s
    xi_absorption: float  # 1/s
    mass_m: float

    @property
    def xi_total(self) -> float:
        return self.xi_scattering + self.xi_absorption

    def force_at(self, v: float) -> float:
        """Drag force in N on a particle moving at v m/s; always opposes the motion."""
        return -self.xi_total * self.mass_m * v


def _closed(mat, p, bath):
    f = cm_factors(mat)
    q = thermal_wavenumber(bath.temperature_T)
    scat = SCATTERING_COEFFICIENT * p.radius_a**6 * HBAR * p.beta / p.mass_m * q**8 * f.scattering
    absorb = ABSORPTION_COEFFICIENT * p.radius_a**3 * HBAR / p.mass_m * q**5 * f.absorption
    return scat, absorb


def _quadrature(mat, p, bath):
    pol = cm_polarizability(mat, p)
    T = bath.temperature_T
    pref = MU_0 * HBAR / (3.0 * PI**2 * p.mass_m * C**5)
    scat = absorb = 0.0
    if pol.alpha_sq:
        # radiative alpha_I = (mu_0/6pi)(omega/c)^3 |alpha|^2 beta adds three powers of omega
        integral = bose_integral_quadrature(8, BoseWeight.OCCUPATION_DERIVATIVE, T).value
        scat = pref * abs(MU_0 / (6.0 * PI * C**3) * pol.alpha_sq * p.beta * integral)
    if pol.alpha_i_abs:
        integral = bose_integral_quadrature(5, BoseWeight.OCCUPATION_DERIVATIVE, T).value
        absorb = pref * abs(pol.alpha_i_abs * integral)
    return scat, absorb


def drag_coefficient(mat: Material, p: Particle, bath: ThermalBath,
                     method: Method = Method.CLOSED_FORM) -> DragResult:
    """Drag coefficient xi split into scattering and absorption channels."""
    if Method(method) is Method.CLOSED_FORM:
        scat, absorb = _closed(mat, p, bath)
    else:
        scat, absorb = _quadrature(mat, p, bath)
    return DragResult(xi_scattering=scat, xi_absorption=absorb, mass_m=p.mass_m)


def drag_dielectric(epsilon_r: float, p: Particle, bath: ThermalBath) -> float:
    """Drag coefficient of a non-absorbing dielectric sphere, (512 pi^7 a^6 hbar / 135 m) q^8 |(e-1)/(e+2)|^2."""
    q = thermal_wavenumber(bath.temperature_T)
    return 512.0 * PI**7 * p.radius_a**6 * HBAR / (135.0 * p.mass_m) * q**8 * dielectric_factor(epsilon_r)


def drag_ratio(mat: Material, epsilon_r: float) -> float:
    """xi_B / xi_E as published for chi_i = 0.

    The published relation is stated for beta = 1/2, but it reproduces the
    scattering channel exactly only for beta = 1.
    """
    return dielectric_comparison_ratio(mat.chi_r, epsilon_r)
