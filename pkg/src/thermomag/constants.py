"""Physical constants (SI, CODATA 2018) and the reduced-frequency map.

Every formula in the package pulls its constants from here.  Values are fixed
literals so results are bit-reproducible.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields

from .errors import DomainError


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.054571817e-34     # J s
    c: float = 299792458.0            # m/s (exact)
    k_B: float = 1.380649e-23         # J/K (exact)
    mu_0: float = 1.25663706212e-6    # N/A^2
    eps_0: float = 8.8541878128e-12   # F/m

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"constant {f.name} must be positive")

    def digest(self) -> str:
        """Short SHA-256 of the stored values, echoed into sweep metadata."""
        text = ";".join(f"{f.name}={getattr(self, f.name)!r}" for f in fields(self))
        return hashlib.sha256(text.encode("ascii")).hexdigest()[:16]


CONSTANTS = PhysicalConstants()

HBAR = CONSTANTS.hbar
C = CONSTANTS.c
K_B = CONSTANTS.k_B
MU_0 = CONSTANTS.mu_0
EPS_0 = CONSTANTS.eps_0


class ReducedFrequency(float):
    """Dimensionless photon energy x = hbar*omega / (k_B T)."""

    def __new__(cls, x):
        if x < 0:
            raise DomainError("reduced frequency must be non-negative")
        return super().__new__(cls, x)


def _check_temperature(T):
    if not T > 0:
        raise DomainError("bath temperature must be positive")


def to_reduced(omega, T) -> ReducedFrequency:
    """Map an angular frequency [rad/s] at temperature T [K] to x = hbar*omega/(k_B T)."""
    _check_temperature(T)
    if omega < 0:
        raise DomainError("angular frequency must be non-negative")
    return ReducedFrequency(HBAR * omega / (K_B * T))


def thermal_frequency(T) -> float:
    """k_B T / hbar in rad/s."""
    _check_temperature(T)
    return K_B * T / HBAR


def thermal_wavenumber(T) -> float:
    """k_B T / (hbar c) in 1/m."""
    _check_temperature(T)
    return K_B * T / (HBAR * C)
