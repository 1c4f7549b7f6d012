"""Photon-emission rates of two induced magnetic dipoles and their decoherence factor.

R11 is the emission rate of a single dipole, R12 the interference rate
between the two, and F = R11 - R12 the rate at which spatial coherence
between them is lost.  The general path integrates over k numerically with
an exact angular kernel; the long-wavelength path is the d^2 closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import C, MU_0, thermal_wavenumber
from .diffusion import ThermalBath
from .errors import ConvergenceError, DomainError, ParameterError
from .materials import (
    Material,
    Particle,
    cm_factors,
    cm_polarizability,
    dielectric_comparison_ratio,
    dielectric_factor,
)
from .special import (
    BoseWeight,
    bose_reduced,
    integrate_interval,
    occupation,
    random_unit_vectors,
    sphere_pair_cubature,
)

PI = math.pi
ANGULAR_SAME = 64.0 * PI**2 / 3.0  # double solid-angle integral of 1 + cos^2(theta)
_RATE_PREFACTOR = 3.0 * MU_0 * C / (64.0 * PI**4)
DEFAULT_XMAX = 40.0

# deficit(x)/(16 pi^2) = 4x^2/9 - 14x^4/225 + ... ; exact rationals
_DEFICIT_SERIES = (
    4.0 / 9.0,
    -14.0 / 225.0,
    22.0 / 4725.0,
    -64.0 / 297675.0,
    2.0 / 297675.0,
    -58.0 / 383107725.0,
    74.0 / 28733079375.0,
)
_SERIES_SWITCH = 0.5


@dataclass(frozen=True)
class DipolePairConfig:
    separation_d: float
    material: Material
    particle: Particle
    bath: ThermalBath

    def __post_init__(self):
        if self.separation_d < 0:
            raise DomainError("separation must be non-negative")


@dataclass(frozen=True)
class PairRates:
    r_same: float         # R11 = R22, 1/s
    r_cross: float        # R12 = R21, 1/s
    f_decoherence: float  # R11 - R12, 1/s


def pair_angular_kernel(x):
    """Double solid-angle integral of (1 + cos^2 theta) exp(i k (k1 - k2).d) at x = k|d|.

    Equals 32 pi^2 [j0^2 + 3 (j1/x)^2 - 2 j0 j1/x] in spherical Bessel functions.
    """
    return ANGULAR_SAME - pair_angular_deficit(x)


def pair_angular_deficit(x):
    """64 pi^2/3 minus :func:`pair_angular_kernel`, free of cancellation at small x."""
    x = np.abs(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    small = x < _SERIES_SWITCH
    xs = x[small] ** 2
    acc = np.zeros_like(xs)
    for coef in reversed(_DEFICIT_SERIES):
        acc = (acc + coef) * xs
    out[small] = 16.0 * PI**2 * acc
    xl = x[~small]
    s, c = np.sin(xl), np.cos(xl)
    j0 = s / xl
    j1_x = (s / xl - c) / xl**2
    out[~small] = ANGULAR_SAME - 32.0 * PI**2 * (j0 * j0 + 3.0 * j1_x * j1_x - 2.0 * j0 * j1_x)
    return out if out.ndim else float(out)


def _channel_weights(cfg: DipolePairConfig):
    pol = cm_polarizability(cfg.material, cfg.particle)
    q = thermal_wavenumber(cfg.bath.temperature_T)
    scattering = MU_0 / (6.0 * PI) * pol.alpha_sq * q**7
    absorption = pol.alpha_i_abs / cfg.particle.beta * q**4
    return scattering, absorption, q


def _radial(fn, x_max, rtol):
    try:
        return integrate_interval(fn, 0.0, x_max, tol=1e-300, rtol=rtol, max_evals=200_000).value
    except ConvergenceError as exc:
        raise ConvergenceError(
            f"{exc}; the phase kernel oscillates too fast, reduce k_max * separation", exc.result
        ) from exc


def pair_rates_general(cfg: DipolePairConfig, k_max: float | None = None, tol: float = 1e-10) -> PairRates:
    """R11, R12 and F from the full k-space integrals, without the long-wavelength expansion.

    Parameters
    ----------
    cfg : DipolePairConfig
    k_max : float, optional
        Upper wavenumber cutoff in 1/m.  Defaults to 40 k_B T/(hbar c); must
        leave the occupation number below 1e-12 at the cutoff.
    tol : float
        Relative tolerance of each radial integral.
    """
    scat_w, abs_w, q = _channel_weights(cfg)
    x_max = DEFAULT_XMAX if k_max is None else k_max / q
    if occupation(x_max) > 1e-12:
        raise ParameterError(
            f"k_max too small: need k_max >= {math.log1p(1e12) * q:.6e} 1/m for a negligible Planck tail"
        )
    if scat_w == 0 and abs_w == 0:
        return PairRates(0.0, 0.0, 0.0)

    angular_same = sphere_pair_cubature(lambda u: 1.0 + u * u)
    qd = q * cfg.separation_d

    def same(x):
        n = occupation(x)
        return (scat_w * x**6 + abs_w * x**3) * n

    def lost(x):
        n = occupation(x)
        return (scat_w * x**6 + abs_w * x**3) * n * pair_angular_deficit(x * qd)

    r_same = _RATE_PREFACTOR * angular_same * _radial(same, x_max, tol)
    f = 0.0 if qd == 0 else _RATE_PREFACTOR * _radial(lost, x_max, tol)
    return PairRates(r_same=r_same, r_cross=r_same - f, f_decoherence=f)


def decoherence_factor_lw(cfg: DipolePairConfig) -> float:
    """Long-wavelength decoherence factor, proportional to d^2.

    Scattering term ~ a^6 T^9 zeta(9) Gamma(9), absorption term ~ a^3 T^6
    Gamma(6) zeta(6) / beta; both use the plain occupation number n.
    """
    d, a, beta = cfg.separation_d, cfg.particle.radius_a, cfg.particle.beta
    f = cm_factors(cfg.material)
    q = thermal_wavenumber(cfg.bath.temperature_T)
    scat = a**6 * C / (18.0 * PI**3) * f.scattering * q**9 * bose_reduced(8, BoseWeight.OCCUPATION)
    absorb = 0.0
    if f.absorption:
        absorb = a**3 * C / (3.0 * PI**2 * beta) * f.absorption * q**6 * bose_reduced(5, BoseWeight.OCCUPATION)
    return d * d * (scat + absorb)


def dielectric_decoherence_factor(cfg: DipolePairConfig, epsilon_r: float) -> float:
    """Reference factor for a dielectric sphere of the same radius (no absorption)."""
    d, a = cfg.separation_d, cfg.particle.radius_a
    q = thermal_wavenumber(cfg.bath.temperature_T)
    return (d * d * 8.0 * a**6 * C / (9.0 * PI) * dielectric_factor(epsilon_r)
            * q**9 * bose_reduced(8, BoseWeight.OCCUPATION))


def pair_ratio_to_dielectric(mat: Material, epsilon_r: float) -> float:
    """F_B / F_E for chi_i = 0."""
    return dielectric_comparison_ratio(mat.chi_r, epsilon_r)


def first_order_term(n_samples: int = 1_000_000, seed: int = 0):
    """Monte-Carlo estimate of the linear term of the small-kd expansion.

    Integrates (1 + cos^2 theta) (k1 - k2).z over both directions; isotropy
    makes it vanish.  Returns (estimate, standard error).
    """
    rng = np.random.Generator(np.random.Philox(seed))
    k1 = random_unit_vectors(rng, n_samples)
    k2 = random_unit_vectors(rng, n_samples)
    u = np.einsum("ij,ij->i", k1, k2)
    vals = (1.0 + u * u) * (k1[:, 2] - k2[:, 2])
    area2 = (4.0 * PI) ** 2
    return area2 * vals.mean(), area2 * vals.std(ddof=1) / math.sqrt(n_samples)
