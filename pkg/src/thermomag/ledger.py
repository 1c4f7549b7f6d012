"""Printed values that disagree with what the formulas actually give.

Each entry names the owning module, the printed value, the value computed
here, and how the build resolves it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .drag import ABSORPTION_COEFFICIENT, PRINTED_ABSORPTION_COEFFICIENT
from .materials import NANODIAMOND, dielectric_comparison_ratio


@dataclass(frozen=True)
class LedgerEntry:
    key: str
    module: str
    quantity: str
    printed: str
    computed: str
    resolution: str


def _entries() -> list[LedgerEntry]:
    nd = dielectric_comparison_ratio(NANODIAMOND.chi_r, NANODIAMOND.epsilon_r)
    sc_floor = 1.0 / (64.0 * math.pi**2)
    return [
        LedgerEntry(
            "drag-absorption-coefficient", "drag",
            "absorption drag coefficient of (a^3 hbar/m)(k_B T/hbar c)^5 Im[chi/(3+chi)]",
            f"{PRINTED_ABSORPTION_COEFFICIENT}",
            f"{ABSORPTION_COEFFICIENT:.10f} = Gamma(6) zeta(5)/(3 pi^2)",
            "computed value used; the printed number equals Gamma(6) zeta(5)/3 = "
            f"{ABSORPTION_COEFFICIENT * math.pi**2:.4f}, i.e. the 1/pi^2 is missing",
        ),
        LedgerEntry(
            "drag-h-vs-hbar", "drag",
            "prefactor of the drag integral for an absorbing sphere",
            "h (and a stray extra a^3)",
            "hbar, a^3 once",
            "hbar and a single a^3 follow from the general drag integral; h would inflate xi by 2 pi",
        ),
        LedgerEntry(
            "absorption-diffusion-prefactor", "diffusion",
            "absorption term of <dp^2>/dt",
            "hbar^2 a^3 c/(3 pi^2 beta) Im[chi/(3+chi)] (k_B T/hbar c)^6 Gamma(6) zeta(5)",
            "the omega^5 integral form carries 4x that prefactor",
            "printed closed form used in both closed and quadrature paths",
        ),
        LedgerEntry(
            "fdt-constant", "stochastic",
            "<dp^2>/dt / (2 m xi k_B T)",
            "1",
            "2/beta = 4 for scattering; 1/(2 beta) = 1 for absorption with the printed prefactor",
            "fdt_ratio reports the factor; it is temperature independent per channel",
        ),
        LedgerEntry(
            "superconductor-ratio", "materials",
            "decoherence ratio to a dielectric sphere for chi = -1",
            "1e-7",
            f"(1/64 pi^2)|(eps+2)/(eps-1)|^2 >= {sc_floor:.4e} for every eps > 1",
            "formula value authoritative",
        ),
        LedgerEntry(
            "nanodiamond-ratio", "materials",
            "decoherence ratio to a dielectric sphere, chi_r = -2.2e-5, eps = 5.7",
            "1e-11",
            f"{nd:.6e}",
            "formula value authoritative; same order as the printed prose within two decades",
        ),
        LedgerEntry(
            "drag-ratio-shape-factor", "drag",
            "xi_B / xi_E equal to the shared comparison ratio",
            "holds for beta = 1/2",
            "holds exactly only for beta = 1 (factor 2 at beta = 1/2)",
            "drag_ratio returns the shared expression; tests use beta = 1",
        ),
    ]


LEDGER: tuple[LedgerEntry, ...] = tuple(_entries())


def ledger() -> str:
    """Human-readable report of all entries."""
    lines = [f"{len(LEDGER)} recorded discrepancies", ""]
    for i, e in enumerate(LEDGER, 1):
        lines += [
            f"[{i}] {e.key}  (module: {e.module})",
            f"    quantity:   {e.quantity}",
            f"    printed:    {e.printed}",
            f"    computed:   {e.computed}",
            f"    resolution: {e.resolution}",
            "",
        ]
    return "\n".join(lines)
