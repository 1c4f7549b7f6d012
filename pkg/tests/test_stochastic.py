import math
import time
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from thermomag.constants import K_B
from thermomag.diffusion import ThermalBath
from thermomag.errors import DomainError, ParameterError, SingularityError
from thermomag.materials import NANODIAMOND, VACUUM, Material, Particle
from thermomag.stochastic import (
    FokkerPlanckGrid,
    LangevinParams,
    fdt_ratio,
    fokker_planck_operator,
    fokker_planck_solve,
    ks_critical_value,
    ks_statistic,
    langevin_simulate,
    max_explicit_dt,
    maxwell_cdf,
    maxwell_pdf,
)

# units where k_B T / m = 1 (m/s)^2 and xi = 1/s
M = 1.0
T = 1.0 / K_B
XI = 1.0


def unit_pdf(v):
    return maxwell_pdf(v, M, T)


def gaussian(mu, s):
    return lambda v: np.exp(-0.5 * ((v - mu) / s) ** 2)


def grid(n=2000, f=gaussian(3.0, 0.1), half=10.0):
    return FokkerPlanckGrid.from_function(f, -half, half, n)


# --- Maxwell density -------------------------------------------------------

def test_maxwell_pdf():
    assert maxwell_pdf(0.0, 2e-17, 300.0) == pytest.approx(math.sqrt(2e-17 / (2 * math.pi * K_B * 300.0)), rel=1e-15)
    s = math.sqrt(K_B * 300.0 / 2e-17)
    norm, _ = integrate.quad(lambda v: maxwell_pdf(v, 2e-17, 300.0), -10 * s, 10 * s, epsabs=0, epsrel=1e-13)
    assert norm == pytest.approx(1.0, abs=1e-10)
    second, _ = integrate.quad(lambda v: v * v * maxwell_pdf(v, M, T), -12, 12, epsabs=0, epsrel=1e-13)
    assert second == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(DomainError):
        maxwell_pdf(0.0, 1.0, 0.0)
    assert maxwell_cdf(0.0, M, T) == 0.5


def test_ks_critical_value_formula():
    assert ks_critical_value(10_000) == pytest.approx(1.6276 / 100, rel=1e-4)


# --- Langevin --------------------------------------------------------------

def test_params_validation():
    with pytest.raises(ParameterError, match="xi\\*dt"):
        LangevinParams(xi=1.0, diffusion_D=1.0, mass_m=1.0, dt=0.02, steps=10, n_particles=10)
    with pytest.raises(ParameterError):
        LangevinParams(xi=1.0, diffusion_D=-1.0, mass_m=1.0, dt=0.01, steps=10, n_particles=10)
    with pytest.raises(ParameterError):
        LangevinParams(xi=1.0, diffusion_D=1.0, mass_m=1.0, dt=0.01, steps=10, n_particles=0)
    p = LangevinParams.thermal(XI, M, T)
    assert p.dt * p.xi == pytest.approx(0.01) and p.steps * p.dt == pytest.approx(20.0)
    assert p.velocity_variance == pytest.approx(1.0, rel=1e-15)


def test_noise_free_relaxation():
    xi_dt, steps = 1e-3, 3000
    p = LangevinParams(xi=XI, diffusion_D=0.0, mass_m=M, dt=xi_dt, steps=steps, n_particles=8, v0=1.0)
    v = langevin_simulate(p).velocities
    t = steps * xi_dt
    # forward Euler gives (1 - xi dt)^n; its distance to exp(-xi t) is about xi t * xi dt / 2
    assert np.allclose(v, math.exp(-XI * t), rtol=XI * t * xi_dt)
    assert np.all(v == (1 - xi_dt) ** steps) or np.allclose(v, (1 - xi_dt) ** steps, rtol=1e-12)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_equipartition_within_three_standard_errors(seed):
    p = LangevinParams.thermal(XI, M, T, n_particles=10_000, seed=seed)
    d = langevin_simulate(p)
    half_kT = 0.5 * K_B * T
    rel_se = math.sqrt(2.0 / p.n_particles)
    em_bias = p.xi * p.dt / 2  # stationary Euler-Maruyama variance is inflated by 1/(1 - xi dt/2)
    assert abs(d.sample_mean_KE / half_kT - 1) <= 3 * rel_se + em_bias


def test_ks_against_maxwell():
    p = LangevinParams.thermal(XI, M, T, n_particles=10_000, seed=4)
    d = langevin_simulate(p)
    assert ks_statistic(d.velocities, lambda v: maxwell_cdf(v, M, T)) < ks_critical_value(p.n_particles)


def test_ks_statistic_against_scipy():
    from scipy import stats

    x = np.random.default_rng(0).normal(size=500)
    assert ks_statistic(x, stats.norm.cdf) == pytest.approx(stats.kstest(x, "norm").statistic, rel=1e-12)


def test_bit_identical_and_worker_independent():
    p = LangevinParams.thermal(XI, M, T, n_particles=9000, relaxation_times=2.0, seed=123)
    a, b = langevin_simulate(p), langevin_simulate(p, workers=3)
    assert a.velocities.tobytes() == b.velocities.tobytes()
    assert a.densities.tobytes() == b.densities.tobytes()
    c = langevin_simulate(replace(p, seed=124))
    assert c.velocities.tobytes() != a.velocities.tobytes()


def test_histogram_normalization():
    d = langevin_simulate(LangevinParams.thermal(XI, M, T, n_particles=3000, relaxation_times=5.0))
    assert np.all(d.densities >= 0)
    widths = np.diff(d.bin_edges)
    assert float(np.sum(d.densities * widths)) == pytest.approx(1.0, abs=1e-6)


# --- Fokker-Planck ---------------------------------------------------------

def test_operator_conserves_mass_and_fixes_maxwell():
    g = grid(400, unit_pdf)
    L = fokker_planck_operator(g, XI, M, T)
    colsum = np.asarray(L.sum(axis=0)).ravel()
    assert np.max(np.abs(colsum)) < 1e-12 * abs(L.diagonal()).max()
    assert np.max(np.abs(L @ g.w)) < 1e-12 * abs(L.diagonal()).max() * g.w.max()
    off = L - np_diag(L)
    assert off.min() >= 0


def np_diag(L):
    import scipy.sparse as sps

    return sps.diags(L.diagonal())


def test_stationary_maxwell():
    g = grid(2000, unit_pdf)
    out = fokker_planck_solve(g, XI, M, T, 20.0)
    assert out.l1_distance(unit_pdf) <= 1e-6
    assert out.time == 20.0


def test_relaxation_to_maxwell_and_timing():
    t0 = time.perf_counter()
    out = fokker_planck_solve(grid(2000), XI, M, T, 20.0 / XI)
    elapsed = time.perf_counter() - t0
    assert out.l1_distance(unit_pdf) <= 1e-3
    assert elapsed < 10.0
    assert out.max_step_mass_drift <= 1e-8
    assert np.all(out.w >= 0)


@pytest.mark.parametrize("t", [0.1, 0.5, 1.0, 3.0])
def test_variance_relaxation(t):
    g = grid(2000, gaussian(3.0, 0.3))
    v = g.centers

    def var(gr):
        mean = np.sum(gr.w * v) * gr.dv
        return np.sum(gr.w * v * v) * gr.dv - mean**2

    var0 = var(g)
    out = fokker_planck_solve(g, XI, M, T, t, dt=1e-3)
    expected = 1.0 * (1 - math.exp(-2 * XI * t)) + var0 * math.exp(-2 * XI * t)
    assert var(out) == pytest.approx(expected, rel=1e-3)


def test_mean_relaxation():
    g = grid(1000, gaussian(3.0, 0.3))
    out = fokker_planck_solve(g, XI, M, T, 1.0, dt=1e-3)
    mean0 = np.sum(g.w * g.centers) * g.dv
    assert np.sum(out.w * out.centers) * out.dv == pytest.approx(mean0 * math.exp(-1.0), rel=1e-4)


def test_explicit_scheme_and_cfl():
    g = grid(200, gaussian(3.0, 0.5))
    limit = max_explicit_dt(g, XI, M, T)
    assert limit == pytest.approx(0.4 * g.dv**2 / 2.0, rel=1e-14)
    with pytest.raises(ParameterError, match="maximal stable dt"):
        fokker_planck_solve(g, XI, M, T, 1.0, dt=2 * limit, scheme="explicit")
    im = fokker_planck_solve(g, XI, M, T, 0.5, dt=1e-4)
    gaps = []
    for frac in (1.0, 0.1):
        ex = fokker_planck_solve(g, XI, M, T, 0.5, dt=frac * limit, scheme="explicit")
        assert ex.max_step_mass_drift <= 1e-8
        gaps.append(float(np.sum(np.abs(ex.w - im.w))) * g.dv)
    # forward Euler is first order in dt
    assert gaps[1] < 1e-3
    assert gaps[0] / gaps[1] == pytest.approx(10.0, rel=0.05)


def test_fp_preconditions():
    with pytest.raises(ParameterError, match="6 thermal widths"):
        fokker_planck_solve(grid(100, unit_pdf, half=5.0), XI, M, T, 1.0)
    raw = FokkerPlanckGrid(-10, 10, 100, np.ones(100))
    with pytest.raises(ParameterError, match="normalized"):
        fokker_planck_solve(raw, XI, M, T, 1.0)
    bad = np.full(100, 0.05)
    bad[0] = -0.05
    bad[1] += 0.1
    with pytest.raises(ParameterError, match="non-negative"):
        fokker_planck_solve(FokkerPlanckGrid(-10, 10, 100, bad), XI, M, T, 1.0)
    with pytest.raises(ParameterError, match="scheme"):
        fokker_planck_solve(grid(100), XI, M, T, 1.0, scheme="rk4")


@settings(max_examples=10, deadline=None)
@given(st.floats(0.5, 4.0), st.floats(0.05, 1.0), st.floats(0.01, 2.0))
def test_fp_positivity_and_mass(mu, width, t_end):
    out = fokker_planck_solve(grid(300, gaussian(mu, width)), XI, M, T, t_end, dt=0.01)
    assert np.all(out.w >= -1e-15)
    assert out.mass == pytest.approx(1.0, abs=1e-10)


def test_langevin_vs_fokker_planck():
    n = 100_000
    p = LangevinParams.thermal(XI, M, T, n_particles=n, relaxation_times=1.5, seed=9)
    edges = np.linspace(-6, 6, 61)
    hist = langevin_simulate(p, bin_edges=edges, workers=4)
    # both start from v = 0: use a narrow Gaussian on a grid aligned with the bins
    g = FokkerPlanckGrid.from_function(gaussian(0.0, 0.02), -6.0, 6.0, 1200)
    out = fokker_planck_solve(g, XI, M, T, 1.5, dt=1e-3)
    fp_bins = out.w.reshape(60, 20).mean(axis=1)
    l1 = float(np.sum(np.abs(hist.densities - fp_bins) * np.diff(edges)))
    assert l1 <= 5e-2


# --- fluctuation-dissipation diagnostic --------------------------------------

P = Particle(1e-7, 1e-17)


def test_fdt_ratio_constant_for_scattering_channel():
    values = [fdt_ratio(NANODIAMOND, P, ThermalBath(T)) for T in (10.0, 100.0, 300.0, 1000.0)]
    spread = (max(values) - min(values)) / np.mean(values)
    assert spread <= 1e-6
    assert values[0] == pytest.approx(2.0 / P.beta, rel=1e-12)


def test_fdt_ratio_absorption_channel():
    mat = Material("abs", 0.0, 0.1)
    values = [fdt_ratio(mat, P, ThermalBath(T)) for T in (10.0, 100.0, 300.0, 1000.0)]
    # absorption dominates; tiny scattering admixture grows as T^3
    assert values[0] == pytest.approx(1.0 / (2 * P.beta), rel=1e-6)


def test_fdt_ratio_errors():
    with pytest.raises(SingularityError):
        fdt_ratio(VACUUM, P, ThermalBath(300.0))
    r = fdt_ratio(NANODIAMOND, P, ThermalBath(300.0))
    assert math.isfinite(r) and r > 0
