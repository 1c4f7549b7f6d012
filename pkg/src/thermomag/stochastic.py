"""Velocity relaxation under thermal drag: Langevin sampling and a Fokker-Planck solver.

Both describe the 1-D Ornstein-Uhlenbeck process

    dv = -xi v dt + (sqrt(2 D) / m) dW

whose density obeys dw/dt = xi d(v w)/dv + (D/m^2) d^2w/dv^2.  With
D = m xi k_B T the stationary density is the Maxwell distribution.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sps
from scipy.sparse.linalg import factorized
from scipy.special import erf

from .constants import K_B
from .diffusion import ThermalBath, total_diffusion
from .drag import drag_coefficient
from .errors import DomainError, ParameterError, SingularityError
from .materials import Material, Particle

MAX_XI_DT = 0.01
_BLOCK = 4096  # particles per RNG stream; fixed so results do not depend on worker count


@dataclass(frozen=True)
class LangevinParams:
    xi: float           # 1/s
    diffusion_D: float  # kg^2 m^2 s^-3, half of <dp^2>/dt
    mass_m: float       # kg
    dt: float           # s
    steps: int
    n_particles: int
    seed: int = 0
    v0: float = 0.0     # m/s, common initial velocity

    def __post_init__(self):
        for name in ("xi", "mass_m", "dt", "steps", "n_particles"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive")
        if self.diffusion_D < 0:
            raise ParameterError("diffusion_D must be non-negative")
        if self.xi * self.dt > MAX_XI_DT:
            raise ParameterError(
                f"xi*dt = {self.xi * self.dt:.3g} exceeds {MAX_XI_DT}; use dt <= {MAX_XI_DT / self.xi:.6e} s"
            )
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed must be an unsigned 64-bit integer")

    @property
    def velocity_variance(self) -> float:
        """Stationary <v^2> = D / (m^2 xi), i.e. k_B T_eff / m."""
        return self.diffusion_D / (self.mass_m**2 * self.xi)

    @classmethod
    def thermal(cls, xi, mass_m, T, *, n_particles=10_000, relaxation_times=20.0,
                xi_dt=MAX_XI_DT, seed=0, v0=0.0) -> "LangevinParams":
        """Parameters obeying D = m xi k_B T, run for ``relaxation_times``/xi."""
        steps = int(math.ceil(relaxation_times / xi_dt))
        return cls(xi=xi, diffusion_D=mass_m * xi * K_B * T, mass_m=mass_m, dt=xi_dt / xi,
                   steps=steps, n_particles=n_particles, seed=seed, v0=v0)


@dataclass(frozen=True)
class VelocityDistribution:
    bin_edges: np.ndarray
    densities: np.ndarray
    sample_mean_KE: float
    velocities: np.ndarray = field(repr=False)


def _block_stream(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _evolve_block(params: LangevinParams, block: int, size: int) -> np.ndarray:
    rng = _block_stream(params.seed, block)
    v = np.full(size, float(params.v0))
    decay = 1.0 - params.xi * params.dt
    kick = math.sqrt(2.0 * params.diffusion_D * params.dt) / params.mass_m
    noise = np.empty(size)
    for _ in range(params.steps):
        rng.standard_normal(out=noise)
        v *= decay
        v += kick * noise
    return v


def langevin_simulate(params: LangevinParams, bin_edges=None, n_bins: int = 80,
                      workers: int = 1) -> VelocityDistribution:
    """Euler-Maruyama ensemble of independent particle velocities.

    Particles are split into fixed blocks of 4096, each with its own Philox
    stream keyed by (seed, block index), so the output is bit-identical for
    any ``workers``.  Default bins span +-6 thermal widths (or the sample
    range when there is no noise).
    """
    n = params.n_particles
    blocks = [(b, min(_BLOCK, n - b * _BLOCK)) for b in range((n + _BLOCK - 1) // _BLOCK)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda bs: _evolve_block(params, *bs), blocks))
    else:
        parts = [_evolve_block(params, b, s) for b, s in blocks]
    v = np.concatenate(parts)

    if bin_edges is None:
        sigma = math.sqrt(params.velocity_variance)
        if sigma > 0:
            half = max(6.0 * sigma, float(np.max(np.abs(v))))
        else:
            half = max(float(np.max(np.abs(v))), abs(params.v0), 1e-300) * (1 + 1e-12)
        bin_edges = np.linspace(-half, half, n_bins + 1)
    bin_edges = np.asarray(bin_edges, dtype=float)
    densities, _ = np.histogram(v, bins=bin_edges, density=True)
    ke = 0.5 * params.mass_m * float(np.mean(v * v))
    return VelocityDistribution(bin_edges=bin_edges, densities=densities, sample_mean_KE=ke, velocities=v)


# ---------------------------------------------------------------------------

def maxwell_pdf(v, mass_m: float, T: float):
    """1-D Maxwell velocity density (m / 2 pi k_B T)^{1/2} exp(-m v^2 / 2 k_B T)."""
    if not T > 0:
        raise DomainError("bath temperature must be positive")
    s2 = K_B * T / mass_m
    return np.exp(-0.5 * np.square(v) / s2) / math.sqrt(2.0 * math.pi * s2)


def maxwell_cdf(v, mass_m: float, T: float):
    s = math.sqrt(K_B * T / mass_m)
    return 0.5 * (1.0 + erf(np.asarray(v) / (s * math.sqrt(2.0))))


def ks_statistic(samples, cdf) -> float:
    """Two-sided Kolmogorov-Smirnov distance between a sample and a continuous CDF."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    F = cdf(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def ks_critical_value(n: int, alpha: float = 0.01) -> float:
    """Asymptotic KS critical value sqrt(-ln(alpha/2)/2)/sqrt(n)."""
    return math.sqrt(-0.5 * math.log(alpha / 2.0)) / math.sqrt(n)


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FokkerPlanckGrid:
    """Cell-averaged velocity density on a uniform grid of ``n_cells`` cells."""

    v_min: float
    v_max: float
    n_cells: int
    w: np.ndarray
    time: float = 0.0
    max_step_mass_drift: float = 0.0

    def __post_init__(self):
        if not self.v_max > self.v_min:
            raise ParameterError("v_max must exceed v_min")
        if len(self.w) != self.n_cells:
            raise ParameterError("w must have n_cells entries")

    @property
    def dv(self) -> float:
        return (self.v_max - self.v_min) / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return self.v_min + (np.arange(self.n_cells) + 0.5) * self.dv

    @property
    def mass(self) -> float:
        return math.fsum(self.w) * self.dv

    @classmethod
    def from_function(cls, f, v_min, v_max, n_cells, normalize=True) -> "FokkerPlanckGrid":
        dv = (v_max - v_min) / n_cells
        w = np.asarray(f(v_min + (np.arange(n_cells) + 0.5) * dv), dtype=float)
        if normalize:
            w = w / (math.fsum(w) * dv)
        return cls(v_min, v_max, n_cells, w)

    def l1_distance(self, f) -> float:
        """L1 distance to a density f evaluated at the cell centres."""
        return float(np.sum(np.abs(self.w - f(self.centers)))) * self.dv


def _chang_cooper_delta(W):
    W = np.asarray(W, dtype=float)
    out = np.empty_like(W)
    small = np.abs(W) < 1e-4
    out[small] = 0.5 - W[small] / 12.0
    Wl = W[~small]
    out[~small] = 1.0 / Wl - 1.0 / np.expm1(Wl)
    return out


def fokker_planck_operator(grid: FokkerPlanckGrid, xi: float, mass_m: float, T: float):
    """Sparse generator L with dw/dt = L w, zero-flux boundaries.

    Chang-Cooper weighting of the drift at cell faces makes the sampled
    Maxwell density an exact discrete equilibrium and keeps off-diagonals
    non-negative.  Columns sum to zero, so total probability is conserved.
    """
    n, dv = grid.n_cells, grid.dv
    s2 = K_B * T / mass_m
    Dv = xi * s2
    vf = grid.v_min + dv * np.arange(1, n)  # interior faces
    delta = _chang_cooper_delta(vf * dv / s2)
    a = -xi * vf * delta + Dv / dv          # flux coefficient on the left cell
    b = -xi * vf * (1.0 - delta) - Dv / dv  # flux coefficient on the right cell
    diag = np.zeros(n)
    diag[:-1] -= a
    diag[1:] += b
    return sps.diags([a, diag, -b], [-1, 0, 1], shape=(n, n), format="csc") / dv


def _check_grid(grid, s2):
    width = math.sqrt(s2)
    if grid.v_max < 6 * width or grid.v_min > -6 * width:
        raise ParameterError(f"grid must cover +-6 thermal widths (+-{6 * width:.4e} m/s)")
    if np.any(grid.w < 0):
        raise ParameterError("initial density must be non-negative")
    if abs(grid.mass - 1.0) > 1e-8:
        raise ParameterError(f"initial density must be normalized (mass {grid.mass:.12g})")


def max_explicit_dt(grid: FokkerPlanckGrid, xi: float, mass_m: float, T: float) -> float:
    """Largest stable forward-Euler step, 0.4 dv^2 / (2 xi k_B T / m)."""
    return 0.4 * grid.dv**2 / (2.0 * xi * K_B * T / mass_m)


def fokker_planck_solve(grid: FokkerPlanckGrid, xi: float, mass_m: float, T: float, t_end: float,
                        dt: float | None = None, scheme: str = "bdf2") -> FokkerPlanckGrid:
    """Advance the density to ``time + t_end``.

    ``scheme="bdf2"`` (default) uses second-order backward differences with a
    backward-Euler first step; the system matrix is factorized once.
    ``scheme="explicit"`` is forward Euler and enforces the diffusive CFL
    bound, raising with the largest admissible step.
    """
    if not (xi > 0 and mass_m > 0 and t_end >= 0):
        raise ParameterError("need xi > 0, mass > 0 and t_end >= 0")
    s2 = K_B * T / mass_m
    _check_grid(grid, s2)
    L = fokker_planck_operator(grid, xi, mass_m, T)
    w = grid.w.astype(float).copy()
    mass0 = math.fsum(w)
    drift = 0.0
    if t_end == 0:
        return grid

    if scheme == "explicit":
        limit = max_explicit_dt(grid, xi, mass_m, T)
        if dt is None:
            dt = limit
        elif dt > limit:
            raise ParameterError(f"dt = {dt:.6e} s violates the CFL bound; maximal stable dt is {limit:.6e} s")
        steps = int(math.ceil(t_end / dt))
        dt = t_end / steps
        for _ in range(steps):
            w = w + dt * (L @ w)
            drift = max(drift, abs(math.fsum(w) - mass0) / mass0)
    elif scheme == "bdf2":
        if dt is None:
            dt = 2e-3 / xi
        steps = max(2, int(math.ceil(t_end / dt)))
        dt = t_end / steps
        eye = sps.identity(grid.n_cells, format="csc")
        solve_be = factorized((eye - dt * L).tocsc())
        solve_bdf2 = factorized((1.5 * eye - dt * L).tocsc())
        w_prev, w = w, solve_be(w)
        drift = abs(math.fsum(w) - mass0) / mass0
        for _ in range(steps - 1):
            w_prev, w = w, solve_bdf2(2.0 * w - 0.5 * w_prev)
            drift = max(drift, abs(math.fsum(w) - mass0) / mass0)
    else:
        raise ParameterError(f"unknown scheme {scheme!r}")
    return replace(grid, w=w, time=grid.time + t_end, max_step_mass_drift=drift)


# ---------------------------------------------------------------------------

def fdt_ratio(mat: Material, p: Particle, bath: ThermalBath) -> float:
    """<dp^2>/dt divided by 2 m xi k_B T.

    Unity would mean the computed drag and diffusion satisfy the
    fluctuation-dissipation relation exactly; for the scattering channel it
    comes out as 2/beta.
    """
    xi = drag_coefficient(mat, p, bath).xi_total
    if xi == 0:
        raise SingularityError("drag coefficient is zero (no material response)")
    return total_diffusion(mat, p, bath) / (2.0 * p.mass_m * xi * K_B * bath.temperature_T)
