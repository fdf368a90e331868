"""Angular algebra, species data, thermal averaging and linear absorption."""

import math

import numpy as np
import pytest
import scipy.constants as sc
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from orcasim.atomphys import (
    decay_branching,
    fit_temperature,
    hyperfine_offset,
    load_species,
    make_ensemble,
    relative_line_strength,
    thermal_speed,
    transmission_spectrum,
    velocity_quadrature,
    voigt_absorption,
    wigner_6j,
)
from orcasim.errors import ConfigurationError, DomainError, FitConvergenceError
from support import surgery

TWO_PI = 2.0 * math.pi

half_integers = st.integers(min_value=0, max_value=8).map(lambda t: t / 2.0)


# ---------------------------------------------------------------- angular

@settings(max_examples=60, deadline=None)
@given(half_integers, half_integers, half_integers,
       half_integers, half_integers, half_integers)
def test_wigner_6j_matches_symbolic(j1, j2, j3, j4, j5, j6):
    """Closed-form 6j against sympy's exact symbolic evaluation."""
    from sympy import Rational
    from sympy.physics.wigner import wigner_6j as symbolic

    ours = wigner_6j(j1, j2, j3, j4, j5, j6)
    try:
        ref = float(symbolic(*(Rational(int(2 * j), 2)
                               for j in (j1, j2, j3, j4, j5, j6))))
    except ValueError:
        # sympy rejects half-integer-parity violations outright
        ref = 0.0
    assert ours == pytest.approx(ref, abs=1e-12)


def test_wigner_6j_reference_values():
    # exact rationals from symbolic evaluation
    assert wigner_6j(1, 1, 1, 1, 1, 1) == pytest.approx(1.0 / 6.0, rel=1e-14)
    assert wigner_6j(2, 2, 2, 2, 2, 2) == pytest.approx(-3.0 / 70.0, rel=1e-14)
    assert wigner_6j(0.5, 0.5, 1, 0.5, 0.5, 0) == pytest.approx(0.5, rel=1e-14)
    assert wigner_6j(1.5, 2.5, 1, 3.5, 4.5, 4) == pytest.approx(
        math.sqrt(42.0) / 120.0, rel=1e-13)
    assert wigner_6j(1, 1, 3, 1, 1, 1) == 0.0


def test_wigner_6j_rejects_mixed_parity():
    with pytest.raises(DomainError):
        wigner_6j(0.7, 1, 1, 1, 1, 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 7), st.integers(1, 5), st.sampled_from([-2, 0, 2]))
def test_line_strength_sum_rule(tI, tJl, dJ):
    """Squared amplitudes over the upper manifold sum to 1 per lower level."""
    from hypothesis import assume

    tJu = tJl + dJ
    assume(tJu >= 1)
    for tFl in range(abs(tJl - tI), tJl + tI + 1, 2):
        total = sum(
            relative_line_strength(tFl / 2, tFu / 2, tJl / 2, tJu / 2, tI / 2) ** 2
            for tFu in range(abs(tJu - tI), tJu + tI + 1, 2)
        )
        assert total == pytest.approx(1.0, abs=1e-12)


def test_decay_branching_sums_to_one(cs, rb):
    for sp in (cs, rb):
        g_name, e_name, s_name = sp.ladder
        for up, lo in ((e_name, g_name), (s_name, e_name)):
            man_u, man_l = sp.manifold(up), sp.manifold(lo)
            for lu in man_u.levels:
                total = sum(
                    decay_branching(lu.F, ll.F, man_u.J, man_l.J, sp.nuclear_spin)
                    for ll in man_l.levels
                )
                assert total == pytest.approx(1.0, abs=1e-12)


def test_forbidden_components_vanish():
    assert relative_line_strength(4.0, 2.0, 0.5, 1.5, 3.5) == 0.0  # |dF| = 2
    assert relative_line_strength(0.0, 0.0, 0.5, 0.5, 0.5) == 0.0  # F 0 -> 0
    assert decay_branching(6.0, 3.0, 2.5, 1.5, 3.5) == 0.0


# ---------------------------------------------------------------- species

def test_hyperfine_centroid_and_clock_splitting(cs):
    for man in cs.manifolds.values():
        w = np.array([2 * lv.F + 1 for lv in man.levels])
        off = np.array([lv.offset for lv in man.levels])
        scale = max(float(np.abs(off).max()), 1.0)
        assert abs(w @ off) / (w.sum() * scale) < 1e-12
    ground = cs.manifold(cs.ladder[0])
    clock = ground.level(4.0).offset - ground.level(3.0).offset
    # the SI second: F=3 to F=4 splitting is 9 192 631 770 Hz by definition
    assert clock == pytest.approx(TWO_PI * 9_192_631_770.0, rel=1e-12)


def test_hyperfine_offset_quadrupole_guard():
    A = TWO_PI * 1e6
    # dipole term only: offset = A K / 2 with K = F(F+1) - I(I+1) - J(J+1)
    assert hyperfine_offset(4.0, 3.5, 0.5, A, 0.0) == pytest.approx(1.75 * A)
    with pytest.raises(DomainError):
        hyperfine_offset(1.0, 0.5, 0.5, A, TWO_PI * 1e5)


def test_species_aliases_and_unknown():
    assert load_species("cs").name == "cesium-133"
    assert load_species("Cesium-133").name == "cesium-133"
    assert load_species("rb87").name == "rubidium-87"
    assert load_species("rubidium87").name == "rubidium-87"
    with pytest.raises(ConfigurationError):
        load_species("francium")


def test_ladder_structure(cs, rb):
    assert [len(cs.manifold(m).levels) for m in cs.ladder] == [2, 4, 6]
    assert [len(rb.manifold(m).levels) for m in rb.ladder] == [2, 4, 4]
    assert cs.memory_ground_F == 4.0
    assert rb.memory_ground_F == 2.0
    lower, upper = cs.ladder_transitions
    assert lower.wavelength == pytest.approx(852.34727582e-9, rel=1e-12)
    assert upper.wavelength == pytest.approx(917.4834e-9, rel=1e-12)
    assert cs.mass > 0 and rb.mass > 0
    for sp in (cs, rb):
        for name in sp.ladder[1:]:
            assert sp.manifold(name).linewidth > 0


# ---------------------------------------------------------------- thermal

def test_thermal_speed_values(cs, rb):
    v = thermal_speed(cs, 364.15)
    assert v == pytest.approx(150.93357233941475, rel=1e-12)  # sqrt(kB T / m)
    assert thermal_speed(cs, 4 * 364.15) == pytest.approx(2 * v, rel=1e-14)
    assert thermal_speed(rb, 364.15) == pytest.approx(186.64846472560708, rel=1e-12)
    # species dependence is purely through the mass
    assert v * math.sqrt(cs.mass) == pytest.approx(
        thermal_speed(rb, 364.15) * math.sqrt(rb.mass), rel=1e-13)
    with pytest.raises(DomainError):
        thermal_speed(cs, 0.0)


_CS = load_species("cs")
_ENS = make_ensemble(_CS, 364.15, 0.072, number_density=1e17)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 64))
def test_velocity_quadrature_properties(n):
    nodes = velocity_quadrature(_ENS, n)
    v = np.array([p[0] for p in nodes])
    w = np.array([p[1] for p in nodes])
    assert len(nodes) == n
    assert np.all(w >= 0.0)
    assert w.sum() == pytest.approx(1.0, abs=1e-12)
    assert abs(w @ v) < 1e-9 * _ENS.thermal_speed
    if n >= 2:
        assert w @ v**2 == pytest.approx(_ENS.thermal_speed**2, rel=1e-10)


def test_velocity_quadrature_single_node_and_validation():
    assert velocity_quadrature(_ENS, 1) == [(0.0, 1.0)]
    with pytest.raises(DomainError):
        velocity_quadrature(_ENS, 0)


def test_velocity_quadrature_characteristic_function():
    """Doppler phase averages reproduce the Gaussian exp(-phi^2/2)."""
    nodes = velocity_quadrature(_ENS, 64)
    v = np.array([p[0] for p in nodes])
    w = np.array([p[1] for p in nodes])
    v_s = _ENS.thermal_speed
    for phi in (0.25, 0.5, 1.0, 2.0, 3.0, 4.0):  # phi = k v_s t
        cf = w @ np.exp(1j * phi * v / v_s)
        assert abs(cf - math.exp(-0.5 * phi**2)) < 1e-6


# ---------------------------------------------------------------- absorption

_ONE_LINE_YAML = """\
name: test-single-line
mass_kg: 2.0e-25
nuclear_spin: 0.0
ladder: [g, e, s]
memory_ground_F: 0.5
manifolds:
  g: {J: 0.5, A_MHz: 0.0, B_MHz: 0.0, linewidth_MHz: 0.0}
  e: {J: 0.5, A_MHz: 0.0, B_MHz: 0.0, linewidth_MHz: 5.0}
  s: {J: 0.5, A_MHz: 0.0, B_MHz: 0.0, linewidth_MHz: 1.0}
transitions:
  g-e: {wavelength_nm: 852.0, reduced_dipole_Cm: 3.0e-29}
  e-s: {wavelength_nm: 917.0, reduced_dipole_Cm: 2.0e-29}
vapor_pressure:
  coefficients: {a: 7.0, b: 3800.0}
  citation: test fixture
"""


@pytest.fixture(scope="module")
def one_line(tmp_path_factory):
    """Zero-nuclear-spin species: a single absorption component."""
    path = tmp_path_factory.mktemp("species") / "single.yaml"
    path.write_text(_ONE_LINE_YAML)
    return load_species(path)


def test_voigt_matches_velocity_integral(one_line):
    """Line shape against brute-force Maxwell x Lorentzian integration."""
    ens = make_ensemble(one_line, 350.0, 0.05, number_density=5e16)
    tr = one_line.transition("g", "e")
    k = tr.wavenumber
    gamma = one_line.manifold("e").linewidth
    v_s = ens.thermal_speed
    kappa = (ens.number_density * tr.angular_frequency * tr.reduced_dipole**2
             / (6.0 * sc.hbar * sc.epsilon_0 * sc.c))

    def oracle(delta):
        def integrand(v):
            maxwell = math.exp(-0.5 * (v / v_s) ** 2) / (v_s * math.sqrt(TWO_PI))
            lorentz = (0.5 * gamma / math.pi) / ((delta - k * v) ** 2
                                                 + (0.5 * gamma) ** 2)
            return maxwell * lorentz

        span = 10.0 * v_s
        pts = sorted({p for p in (0.0, delta / k) if abs(p) < span})
        val, _ = quad(integrand, -span, span, points=pts, limit=300,
                      epsabs=0.0, epsrel=1e-11)
        return TWO_PI * kappa * val

    sigma_d = k * v_s
    for delta in (0.0, 0.5 * sigma_d, -sigma_d, 3.0 * sigma_d, TWO_PI * 2e9):
        assert voigt_absorption(delta, ens, one_line) == pytest.approx(
            oracle(delta), rel=1e-8)


def test_voigt_even_in_detuning(one_line):
    ens = make_ensemble(one_line, 350.0, 0.05, number_density=5e16)
    sigma_d = one_line.transition("g", "e").wavenumber * ens.thermal_speed
    grid = np.linspace(0.0, 5 * sigma_d, 21)
    assert np.allclose(voigt_absorption(grid, ens, one_line),
                       voigt_absorption(-grid, ens, one_line), rtol=1e-12)


def test_voigt_zero_density(one_line):
    ens = make_ensemble(one_line, 350.0, 0.05, number_density=0.0)
    assert voigt_absorption(0.0, ens, one_line) == 0.0


def test_voigt_gaussian_limit(one_line):
    """Natural linewidth far below Doppler width: pure Gaussian profile."""
    narrow = surgery(one_line, gamma_e=TWO_PI * 1.0)  # 1 Hz
    ens = make_ensemble(narrow, 350.0, 0.05, number_density=5e16)
    sigma_d = narrow.transition("g", "e").wavenumber * ens.thermal_speed
    ratio = (voigt_absorption(sigma_d, ens, narrow)
             / voigt_absorption(0.0, ens, narrow))
    assert ratio == pytest.approx(math.exp(-0.5), rel=1e-6)


def test_off_resonant_absorption_is_small(cs):
    """A few GHz off the nearest populated line the cell is nearly clear."""
    ens = make_ensemble(cs, 364.15, 0.072)  # saturated vapor density
    man_g = cs.manifold(cs.ladder[0])
    man_e = cs.manifold(cs.ladder[1])
    center = man_e.level(5.0).offset - man_g.level(4.0).offset
    alpha = voigt_absorption(center + TWO_PI * 6e9, ens, cs)
    assert 1.0 - math.exp(-alpha * ens.cell_length) < 0.05


def test_fit_temperature_roundtrip(cs):
    ens = make_ensemble(cs, 364.15, 0.072)
    detunings = np.linspace(-7.5e10, 7.5e10, 121)
    trans = transmission_spectrum(detunings, ens, cs)

    fitted = fit_temperature(zip(detunings, trans), cs, 0.072)
    assert fitted == pytest.approx(364.15, abs=0.1)

    rng = np.random.default_rng(42)
    noisy = np.clip(trans * (1.0 + 0.01 * rng.standard_normal(trans.size)), 0.0, 1.0)
    fitted_noisy = fit_temperature(zip(detunings, noisy), cs, 0.072)
    assert fitted_noisy == pytest.approx(364.15, abs=2.0)


def test_fit_temperature_flat_spectrum_fails(cs):
    detunings = np.linspace(-7.5e10, 7.5e10, 40)
    with pytest.raises(FitConvergenceError):
        fit_temperature([(d, 1.0) for d in detunings], cs, 0.072)


def test_fit_temperature_validation(cs):
    with pytest.raises(DomainError):
        fit_temperature([(0.0, 0.5)] * 4, cs, 0.072)  # too few points
    bad = [(d, 1.5) for d in np.linspace(-1e10, 1e10, 9)]
    with pytest.raises(DomainError):
        fit_temperature(bad, cs, 0.072)
