import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from thermomag.constants import C, MU_0
from thermomag.errors import ConfigError, DomainError, SingularityError
from thermomag.materials import (
    NANODIAMOND,
    PRESETS,
    SUPERCONDUCTOR,
    VACUUM,
    Material,
    Particle,
    alpha_i_extinction,
    cm_factors,
    cm_polarizability,
    cross_sections,
    dielectric_comparison_ratio,
    dielectric_factor,
    load_presets,
    mie_a1,
    parse_materials,
)

P = Particle(radius_a=1e-7, mass_m=1e-17)
VOL = 1e-21 / MU_0


def test_presets():
    assert set(PRESETS) == {"nanodiamond", "superconductor", "vacuum"}
    assert (NANODIAMOND.chi_r, NANODIAMOND.chi_i, NANODIAMOND.epsilon_r) == (-2.2e-5, 0.0, 5.7)
    assert SUPERCONDUCTOR.chi_r == -1.0 and SUPERCONDUCTOR.epsilon_r is None
    assert VACUUM.chi_r == 0.0 and VACUUM.chi_i == 0.0
    for m in PRESETS.values():
        assert m.chi_i == 0.0  # never defaulted nonzero
        assert m.epsilon_r is None or m.epsilon_r >= 1
    with pytest.raises(ConfigError):
        SUPERCONDUCTOR.require_epsilon()


def test_material_invariants():
    with pytest.raises(DomainError):
        Material("bad", 0.1, -0.01)
    with pytest.raises(SingularityError, match="Clausius-Mossotti resonance"):
        Material("res", -3.0, 0.0)
    with pytest.raises(DomainError):
        Particle(0.0, 1.0)
    with pytest.raises(DomainError):
        Particle(1e-7, 1e-17, beta=0.0)
    assert Particle(1e-7, 1e-17).beta == 0.5


def test_vacuum_polarizability_zero():
    pol = cm_polarizability(VACUUM, P)
    assert (pol.alpha_r, pol.alpha_i_abs, pol.alpha_sq) == (0.0, 0.0, 0.0)


def test_nanodiamond_polarizability():
    pol = cm_polarizability(NANODIAMOND, P)
    chi = -2.2e-5
    assert pol.alpha_r / VOL == pytest.approx((chi * chi + 3 * chi) / (3 + chi) ** 2, rel=1e-15)
    assert pol.alpha_r / VOL == pytest.approx(-7.3335e-6, rel=1e-4)
    assert pol.alpha_i_abs == 0.0


def test_absorptive_polarizability_hand_value():
    pol = cm_polarizability(Material("x", 0.0, 3.0), P)
    assert pol.alpha_i_abs == pytest.approx(VOL / 2, rel=1e-15)


@given(st.floats(-1.0, 1.0), st.floats(0.0, 1.0))
def test_alpha_sq_identity(cr, ci):
    pol = cm_polarizability(Material("g", cr, ci), P)
    assert pol.alpha_sq == pytest.approx(pol.alpha_r**2 + pol.alpha_i_abs**2, rel=1e-12, abs=1e-300)
    assert pol.alpha_sq >= pol.alpha_r**2 * (1 - 1e-12)
    assert pol.alpha_i_abs >= 0


@given(st.floats(-1.0, 1.0), st.floats(0.0, 1.0))
def test_cm_factors_match_complex_arithmetic(cr, ci):
    z = complex(cr, ci) / (3 + complex(cr, ci))
    f = cm_factors(Material("g", cr, ci))
    assert f.real == pytest.approx(z.real, abs=1e-15)
    assert f.absorption == pytest.approx(z.imag, abs=1e-15)
    assert f.scattering == pytest.approx(abs(z) ** 2, rel=1e-12, abs=1e-300)


def test_radius_scaling():
    mat = Material("g", -0.3, 0.2)
    p1, p2 = cm_polarizability(mat, P), cm_polarizability(mat, Particle(2e-7, 1e-17))
    assert p2.alpha_r / p1.alpha_r == pytest.approx(8.0, rel=1e-14)
    assert p2.alpha_i_abs / p1.alpha_i_abs == pytest.approx(8.0, rel=1e-14)
    assert p2.alpha_sq / p1.alpha_sq == pytest.approx(64.0, rel=1e-14)


def test_alpha_i_extinction():
    mat = Material("g", -0.3, 0.2)
    assert alpha_i_extinction(mat, P, 0.0) == cm_polarizability(mat, P).alpha_i_abs
    omega = 1e15
    pol = cm_polarizability(NANODIAMOND, P)
    # term by term
    k = omega / 299792458.0
    expected = 1.25663706212e-6 / (6 * math.pi) * k**3 * pol.alpha_sq * 0.5
    assert alpha_i_extinction(NANODIAMOND, P, omega) == pytest.approx(expected, rel=1e-14)
    with pytest.raises(DomainError):
        alpha_i_extinction(mat, P, -1.0)


def test_cross_sections():
    cs = cross_sections(NANODIAMOND, P, 1e15)
    assert cs.sigma_abs == 0.0 and cs.sigma_ext == cs.sigma_sca > 0
    cs0 = cross_sections(VACUUM, P, 1e15)
    assert (cs0.sigma_sca, cs0.sigma_abs, cs0.sigma_ext) == (0.0, 0.0, 0.0)
    assert cross_sections(NANODIAMOND, P, 2e15).sigma_sca / cs.sigma_sca == pytest.approx(16.0, rel=1e-13)
    mat = Material("g", -0.3, 0.2)
    cs = cross_sections(mat, P, 3e14)
    assert cs.sigma_ext == cs.sigma_sca + cs.sigma_abs
    with pytest.raises(DomainError):
        cross_sections(mat, P, 0.0)


def test_optical_theorem_consistency():
    for omega in np.logspace(10, 16, 13):
        k = omega / C
        lhs = MU_0 * k * P.beta * alpha_i_extinction(NANODIAMOND, P, omega)
        assert lhs == pytest.approx(cross_sections(NANODIAMOND, P, omega).sigma_sca, rel=1e-13)


def test_cross_sections_monotone_in_omega():
    mat = Material("g", -0.3, 0.2)
    prev = None
    for omega in np.logspace(10, 16, 20):
        cs = cross_sections(mat, P, omega)
        if prev:
            assert cs.sigma_sca >= prev.sigma_sca and cs.sigma_abs >= prev.sigma_abs and cs.sigma_ext >= prev.sigma_ext
        prev = cs


def test_mie_a1():
    assert mie_a1(NANODIAMOND, P, 0.0) == 0
    a1 = mie_a1(NANODIAMOND, P, 1e7)
    assert a1.real == 0.0 and a1.imag != 0.0
    k = 3e6
    a1 = mie_a1(NANODIAMOND, P, k)
    sca = 6 * math.pi / k**2 * abs(a1) ** 2
    assert sca == pytest.approx(cross_sections(NANODIAMOND, P, k * C).sigma_sca, rel=1e-13)
    with pytest.raises(DomainError):
        mie_a1(NANODIAMOND, P, -1.0)


def test_dielectric_factor():
    assert dielectric_factor(1.0) == 0.0
    assert dielectric_factor(5.7) == pytest.approx((4.7 / 7.7) ** 2, rel=1e-15)
    assert dielectric_factor(5.7) == pytest.approx(0.37255, rel=1e-4)
    assert dielectric_factor(1e9) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(SingularityError):
        dielectric_factor(-2.0)


def test_comparison_ratio():
    r = dielectric_comparison_ratio(-2.2e-5, 5.7)
    assert r == pytest.approx((2.2e-5 / 2.999978) ** 2 * (7.7 / 4.7) ** 2 / (16 * math.pi**2), rel=1e-12)
    assert r == pytest.approx(9.14061102921789e-13, rel=1e-12)
    assert dielectric_comparison_ratio(0.0, 5.7) == 0.0
    eps = 3.0
    assert dielectric_comparison_ratio(-1.0, eps) == pytest.approx(0.25 * (5 / 2) ** 2 / (16 * math.pi**2), rel=1e-14)
    with pytest.raises(SingularityError):
        dielectric_comparison_ratio(-1.0, 1.0)


def test_parse_materials(tmp_path):
    doc = {"materials": [{"name": "foo", "chi_r": -0.1, "chi_i": 0.01, "epsilon_r": 2.0}, {"name": "bar", "chi_r": 0.2}]}
    mats = parse_materials(json.dumps(doc))
    assert mats["foo"] == Material("foo", -0.1, 0.01, 2.0)
    assert mats["bar"].chi_i == 0.0 and mats["bar"].epsilon_r is None
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    assert load_presets(path) == mats


@pytest.mark.parametrize("text", [
    "not json",
    '{"materials": [{"name": "a", "chi_r": 0, "colour": "red"}]}',
    '{"materials": [{"name": "a"}]}',
    '{"materials": [{"name": "a", "chi_r": 0}, {"name": "a", "chi_r": 1}]}',
    '{"materials": [{"name": "a", "chi_r": 0, "chi_i": -1}]}',
    '{"other": []}',
])
def test_parse_materials_rejects(text):
    with pytest.raises(ConfigError):
        parse_materials(text)
