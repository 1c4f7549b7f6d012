"""Material response: Clausius-Mossotti magnetic polarizability and Rayleigh cross sections."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from .constants import C, MU_0
from .errors import ConfigError, DomainError, SingularityError

_MATERIAL_KEYS = {"name", "chi_r", "chi_i", "epsilon_r"}


@dataclass(frozen=True)
class Material:
    """Bulk response of a substance.

    Susceptibility and permittivity are frequency independent; ``susceptibility``
    is the hook for a dispersive model.  ``epsilon_r`` may be None when only
    the magnetic response is known.
    """

    name: str
    chi_r: float
    chi_i: float = 0.0
    epsilon_r: Optional[float] = None

    def __post_init__(self):
        if self.chi_i < 0:
            raise DomainError(f"{self.name}: chi_i must be >= 0 for a passive medium")
        if (3.0 + self.chi_r) ** 2 + self.chi_i**2 == 0:
            raise SingularityError(f"{self.name}: Clausius-Mossotti resonance (chi = -3)")

    def susceptibility(self, omega: float = 0.0) -> complex:
        return complex(self.chi_r, self.chi_i)

    def require_epsilon(self) -> float:
        if self.epsilon_r is None:
            raise ConfigError(f"material {self.name!r} has no epsilon_r; supply one")
        return self.epsilon_r


@dataclass(frozen=True)
class Particle:
    radius_a: float
    mass_m: float
    beta: float = 0.5  # shape factor, 1/2 for a sphere

    def __post_init__(self):
        for field in ("radius_a", "mass_m", "beta"):
            if not getattr(self, field) > 0:
                raise DomainError(f"particle {field} must be positive")


@dataclass(frozen=True)
class MagneticPolarizability:
    alpha_r: float      # J/T^2
    alpha_i_abs: float  # J/T^2, absorption part only
    alpha_sq: float     # (J/T^2)^2

    @property
    def complex_value(self) -> complex:
        return complex(self.alpha_r, self.alpha_i_abs)


@dataclass(frozen=True)
class CrossSections:
    sigma_sca: float
    sigma_abs: float
    sigma_ext: float


@dataclass(frozen=True)
class CMFactors:
    """Dimensionless Clausius-Mossotti factors of a susceptibility chi.

    real = Re[chi/(3+chi)], absorption = Im[chi/(3+chi)] = 3 chi_i/D and
    scattering = |chi/(3+chi)|^2, with D = (3+chi_r)^2 + chi_i^2.
    """

    real: float
    absorption: float
    scattering: float


def cm_factors(mat: Material) -> CMFactors:
    cr, ci = mat.chi_r, mat.chi_i
    D = (3.0 + cr) ** 2 + ci**2
    if D == 0:
        raise SingularityError("Clausius-Mossotti resonance")
    num = cr * cr + 3.0 * cr + ci * ci
    return CMFactors(
        real=num / D,
        absorption=3.0 * ci / D,
        scattering=(num * num + 9.0 * ci * ci) / (D * D),
    )


def cm_polarizability(mat: Material, p: Particle) -> MagneticPolarizability:
    """Clausius-Mossotti polarizability alpha = (a^3/mu_0) chi/(3+chi), split into parts.

    ``alpha_sq`` is evaluated from its own closed form rather than as
    alpha_r**2 + alpha_i_abs**2; the two agree algebraically.
    """
    f = cm_factors(mat)
    vol = p.radius_a**3 / MU_0
    return MagneticPolarizability(
        alpha_r=vol * f.real,
        alpha_i_abs=vol * f.absorption,
        alpha_sq=vol * vol * f.scattering,
    )


def alpha_i_extinction(mat: Material, p: Particle, omega: float) -> float:
    """Extinction-side imaginary polarizability: radiative (scattering) part plus absorption."""
    if omega < 0:
        raise DomainError("omega must be non-negative")
    pol = cm_polarizability(mat, p)
    k = omega / C
    return MU_0 / (6.0 * math.pi) * k**3 * pol.alpha_sq * p.beta + pol.alpha_i_abs


def cross_sections(mat: Material, p: Particle, omega: float) -> CrossSections:
    if not omega > 0:
        raise DomainError("cross sections need omega > 0")
    pol = cm_polarizability(mat, p)
    k = omega / C
    sca = MU_0**2 / (6.0 * math.pi) * k**4 * pol.alpha_sq * p.beta**2
    absorb = MU_0 * k * pol.alpha_i_abs * p.beta
    return CrossSections(sigma_sca=sca, sigma_abs=absorb, sigma_ext=sca + absorb)


def mie_a1(mat: Material, p: Particle, k: float) -> complex:
    """Magnetic-dipole Mie coefficient (i/6pi) mu_0 k^3 alpha beta in the Rayleigh limit."""
    if k < 0:
        raise DomainError("wavenumber must be non-negative")
    pol = cm_polarizability(mat, p)
    return 1j / (6.0 * math.pi) * MU_0 * k**3 * pol.complex_value * p.beta


def dielectric_factor(epsilon_r: float) -> float:
    """((eps - 1)/(eps + 2))^2 for a real relative permittivity."""
    if epsilon_r == -2:
        raise SingularityError("epsilon_r = -2 is the Clausius-Mossotti pole")
    return ((epsilon_r - 1.0) / (epsilon_r + 2.0)) ** 2


def dielectric_comparison_ratio(chi_r: float, epsilon_r: float) -> float:
    """(1/16 pi^2) (chi_r/(3+chi_r))^2 |(eps+2)/(eps-1)|^2.

    Shared by the single-particle, two-particle and drag comparisons to a
    dielectric sphere of the same size.
    """
    if epsilon_r == 1:
        raise SingularityError("epsilon_r = 1 has no dielectric response to compare with")
    if chi_r == -3:
        raise SingularityError("Clausius-Mossotti resonance")
    return (chi_r / (3.0 + chi_r)) ** 2 * ((epsilon_r + 2.0) / (epsilon_r - 1.0)) ** 2 / (16.0 * math.pi**2)


# ---------------------------------------------------------------------------
# Preset files

def parse_materials(text: str, source: str = "<string>") -> dict[str, Material]:
    """Parse a materials document: ``{"materials": [{name, chi_r, chi_i, epsilon_r}, ...]}``.

    Unknown keys are rejected.  ``chi_i`` defaults to 0 and ``epsilon_r`` to null.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict) or set(doc) != {"materials"} or not isinstance(doc["materials"], list):
        raise ConfigError(f"{source}: expected a single top-level key 'materials' holding a list")
    out: dict[str, Material] = {}
    for i, rec in enumerate(doc["materials"]):
        if not isinstance(rec, dict):
            raise ConfigError(f"{source}: record {i} is not an object")
        unknown = set(rec) - _MATERIAL_KEYS
        if unknown:
            raise ConfigError(f"{source}: record {i} has unknown keys {sorted(unknown)}")
        if "name" not in rec or "chi_r" not in rec:
            raise ConfigError(f"{source}: record {i} needs 'name' and 'chi_r'")
        eps = rec.get("epsilon_r")
        try:
            mat = Material(
                name=str(rec["name"]),
                chi_r=float(rec["chi_r"]),
                chi_i=float(rec.get("chi_i", 0.0)),
                epsilon_r=None if eps is None else float(eps),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{source}: record {i}: {exc}") from exc
        if mat.name in out:
            raise ConfigError(f"{source}: duplicate material {mat.name!r}")
        out[mat.name] = mat
    return out


def load_presets(path: str | Path | None = None) -> dict[str, Material]:
    """Load a materials file; the bundled presets when ``path`` is None."""
    if path is None:
        text = resources.files("thermomag").joinpath("data/materials.json").read_text(encoding="utf-8")
        return parse_materials(text, "built-in presets")
    path = Path(path)
    return parse_materials(path.read_text(encoding="utf-8"), str(path))


PRESETS = load_presets()
NANODIAMOND = PRESETS["nanodiamond"]
SUPERCONDUCTOR = PRESETS["superconductor"]
VACUUM = PRESETS["vacuum"]
