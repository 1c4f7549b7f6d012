"""Thermal-radiation decoherence, momentum diffusion and drag of diamagnetic nanospheres."""
__version__ = "0.1.0"

from .constants import CONSTANTS, PhysicalConstants, ReducedFrequency, to_reduced  # noqa: E402
from .diffusion import (  # noqa: E402
    DecoherenceResult,
    DiffusionBreakdown,
    Method,
    ThermalBath,
    decoherence_rate,
    diffusion_components,
    total_diffusion,
)
from .drag import DragResult, drag_coefficient  # noqa: E402
from .errors import (  # noqa: E402
    ConfigError,
    ConvergenceError,
    DomainError,
    ParameterError,
    SingularityError,
)
from .materials import PRESETS, Material, Particle, cm_polarizability, cross_sections  # noqa: E402
from .stochastic import fdt_ratio, fokker_planck_solve, langevin_simulate, maxwell_pdf  # noqa: E402
from .two_dipole import DipolePairConfig, PairRates, decoherence_factor_lw, pair_rates_general  # noqa: E402
