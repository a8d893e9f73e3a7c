import numpy as np
import pytest
from scipy.linalg import expm
from scipy.special import dawsn

from semigroup_forge.bath import BathSpec, ohmic_correlation_table, ohmic_spectral, ohmic_spectral_table
from semigroup_forge.errors import (
    AccuracyError,
    InvalidDimensionError,
    MissingSpectralDataError,
    NonPhysicalInputError,
)
from semigroup_forge.generators import is_gkls, lindblad_to_gks, to_superop
from semigroup_forge.linalg import commutator_superop, sprepost
from semigroup_forge.semigroup import (
    evolve_exact,
    evolve_ode,
    kossakowski_positivity_check,
    propagator,
    steady_states,
    trace_distance,
)
from semigroup_forge.zoo import (
    PAULI,
    ZOO,
    FockSpec,
    belavin_generator,
    belavin_is_gkls,
    belavin_to_gks,
    build_zoo,
    cure_lamb,
    davies_generator,
    gibbs_state,
    lamb_generator,
    lamb_propagate,
    landau_generator,
    laser_generator,
    optical_potential_generator,
    pauli_example_generator,
    principal_value_shift,
    redfield_generator,
    redfield_operators,
    thermal_photon_number,
)

from _helpers import random_hermitian, random_mixed_state

SX, SY, SZ = PAULI
B2 = np.array([[0, 1], [0, 0]], dtype=complex)
TIMES = np.linspace(0.0, 3.0, 13)


def thermal_qubit_spectral(temperature=0.5, omega0=1.0):
    return ohmic_spectral_table(0.1, 3.0, temperature, 8.0, 801, include=(omega0, -omega0, 0.0))


# ---------------------------------------------------------------------------
# Fock space, Landau, laser


def test_fock_operators():
    f = FockSpec(5)
    np.testing.assert_allclose(f.a.conj().T @ f.a, np.diag(np.arange(5)), atol=1e-14)
    np.testing.assert_allclose(f.a @ np.eye(5)[:, 3], np.sqrt(3) * np.eye(5)[:, 2])
    assert f.leakage(np.diag([0, 0, 0, 0.5, 0.5])) == 1.0
    for bad in (1, 2.5):
        with pytest.raises(InvalidDimensionError):
            FockSpec(bad)


def test_landau_two_level_is_amplitude_damping():
    g = landau_generator(2, 1.0)
    np.testing.assert_allclose(g.jumps[0], B2)
    np.testing.assert_array_equal(g.H, 0)
    assert is_gkls(lindblad_to_gks(g)).passed
    ss = steady_states(g)
    assert len(ss) == 1
    np.testing.assert_allclose(ss[0], np.diag([1, 0]), atol=1e-12)


def test_landau_mean_photon_number_decays_at_gamma():
    gamma = 0.7
    g = landau_generator(6, gamma)
    rho0 = np.diag([0, 0, 0, 1, 0, 0]).astype(complex)
    traj = evolve_ode(g, rho0, TIMES, rtol=1e-10)
    n = traj.expectation(FockSpec(6).number).real
    np.testing.assert_allclose(n, 3 * np.exp(-gamma * TIMES), atol=1e-8)


def test_landau_rejects_nonpositive_rate():
    with pytest.raises(NonPhysicalInputError):
        landau_generator(3, 0.0)


@pytest.mark.parametrize("nu, delta", [(1.0, 0.2), (1.0, 0.5)])
def test_laser_steady_state(nu, delta):
    nth = delta / (nu - delta)
    d = max(16, int(np.ceil(30 * nth)))
    g = laser_generator(d, nu, delta)
    ss = steady_states(g)
    assert len(ss) == 1
    rho = ss[0]
    f = FockSpec(d)
    assert f.leakage(rho) < 1e-8
    assert np.trace(f.number @ rho).real == pytest.approx(nth, abs=1e-6)
    p = (delta / nu) ** np.arange(d)
    assert trace_distance(rho, np.diag(p / p.sum())) < 1e-6


def test_laser_from_temperature():
    omega, temp = 1.0, 0.8
    g = laser_generator(40, 1.0, omega=omega, temperature=temp)
    delta = np.exp(-omega / temp)
    np.testing.assert_allclose(g.jumps[1], np.sqrt(2 * delta) * FockSpec(40).a.conj().T)
    rho = steady_states(g)[0]
    assert np.trace(FockSpec(40).number @ rho).real == pytest.approx(
        thermal_photon_number(omega, temp), abs=1e-6
    )
    np.testing.assert_allclose(rho, gibbs_state(omega * FockSpec(40).number, temp), atol=1e-9)


def test_laser_without_gain_is_landau():
    a = to_superop(laser_generator(5, 0.6, 0.0)).mat
    b = to_superop(landau_generator(5, 1.2)).mat
    np.testing.assert_allclose(a, b, atol=1e-15)


def test_laser_rejects_gain_above_loss():
    with pytest.raises(NonPhysicalInputError):
        laser_generator(4, 0.5, 0.5)
    with pytest.raises(NonPhysicalInputError):
        laser_generator(4, 1.0, -0.1)
    with pytest.raises(ValueError):
        laser_generator(4, 1.0)


# ---------------------------------------------------------------------------
# optical potential and Lamb


def test_optical_potential_without_absorption_is_unitary(rng):
    h = random_hermitian(rng, 3)
    s = optical_potential_generator(h, np.zeros((3, 3)))
    traj = evolve_exact(s, random_mixed_state(rng, 3), TIMES)
    np.testing.assert_allclose(traj.trace, 1.0, atol=1e-13)


def test_optical_potential_scalar_absorption(rng):
    v = 0.3
    s = optical_potential_generator(random_hermitian(rng, 3), v * np.eye(3))
    traj = evolve_exact(s, random_mixed_state(rng, 3), TIMES)
    np.testing.assert_allclose(traj.trace, np.exp(-2 * v * TIMES), atol=1e-13)


def test_optical_potential_trace_never_increases(rng):
    a = rng.normal(size=(3, 3))
    s = optical_potential_generator(random_hermitian(rng, 3), a @ a.T)
    for _ in range(5):
        tr = evolve_exact(s, random_mixed_state(rng, 3), np.linspace(0, 3, 61)).trace
        assert np.all(np.diff(tr) <= 1e-14)


def test_optical_potential_rejects_negative_v():
    with pytest.raises(NonPhysicalInputError, match="larger|grow"):
        optical_potential_generator(np.zeros((2, 2)), np.diag([0.1, -0.1]))


def test_lamb_closed_form_matches_superop(rng):
    h = random_hermitian(rng, 2)
    s = lamb_generator(h, 0.8, 0.3)
    rho0 = random_mixed_state(rng, 2)
    for t in (0.3, 1.7):
        np.testing.assert_allclose(
            propagator(s, t)(rho0), lamb_propagate(h, 0.8, 0.3, rho0, t), atol=1e-10
        )


def test_lamb_equal_rates_scalar_decay(rng):
    s = lamb_generator(random_hermitian(rng, 2), 0.4, 0.4)
    tr = evolve_exact(s, random_mixed_state(rng, 2), TIMES).trace
    np.testing.assert_allclose(tr, np.exp(-0.4 * TIMES), atol=1e-13)


def test_lamb_diagonal_closed_form():
    p = 0.3
    tr = evolve_exact(lamb_generator(np.zeros((2, 2)), 1.0, 0.2), np.diag([p, 1 - p]), TIMES).trace
    np.testing.assert_allclose(tr, p * np.exp(-TIMES) + (1 - p) * np.exp(-0.2 * TIMES), atol=1e-13)


def test_lamb_trace_derivative_negative(rng):
    s = lamb_generator(random_hermitian(rng, 2), 0.5, 0.9)
    for _ in range(10):
        assert np.trace(s(random_mixed_state(rng, 2))).real < 0


def test_lamb_rejects_negative_rates():
    with pytest.raises(NonPhysicalInputError):
        lamb_generator(np.zeros((2, 2)), -1.0, 0.5)
    with pytest.raises(InvalidDimensionError):
        lamb_generator(np.zeros((3, 3)), 1.0, 0.5)


def test_cured_lamb_default():
    g = cure_lamb(np.diag([0.5, -0.5]), 1.0, 0.0)
    s = to_superop(g)
    assert s.generator_trace_defect() < 1e-15
    assert is_gkls(lindblad_to_gks(g)).passed
    # gamma2 = 0: excited level 0 decays into level 1
    traj = evolve_exact(s, np.diag([1.0, 0.0]), TIMES)
    np.testing.assert_allclose(traj.states[:, 0, 0].real, np.exp(-TIMES), atol=1e-13)


def test_cured_lamb_user_kraus():
    # any Phi with Phi*(I) = G works, e.g. a dephasing-type feed
    k = [np.diag([1.0, 0.0]), np.diag([0.0, np.sqrt(0.5)])]
    g = cure_lamb(np.zeros((2, 2)), 1.0, 0.5, kraus=k)
    assert to_superop(g).generator_trace_defect() < 1e-15
    with pytest.raises(NonPhysicalInputError):
        cure_lamb(np.zeros((2, 2)), 1.0, 0.5, kraus=[np.diag([1.0, 0.0])])


# ---------------------------------------------------------------------------
# Redfield


def test_redfield_zero_bath_is_unitary(rng):
    h = random_hermitian(rng, 2)
    bath = BathSpec("correlation", np.linspace(0, 5, 11), np.zeros(11))
    s = redfield_generator(h, [SX], bath)
    np.testing.assert_allclose(s.mat, commutator_superop(h), atol=0)


def test_redfield_operators_match_direct_quadrature():
    # X = int_0^T h(tau) e^{-iH tau} V e^{iH tau} dtau by brute-force trapezoid
    bath = ohmic_correlation_table(0.1, 3.0, 0.5, 20.0, 2001)
    h = 0.5 * SZ
    x = redfield_operators(h, [SX], bath)[0]
    taus = bath.grid
    vt = np.array([expm(-1j * h * t) @ SX @ expm(1j * h * t) for t in taus])
    direct = np.trapezoid(bath.values[:, 0, 0, None, None] * vt, taus, axis=0)
    np.testing.assert_allclose(x, direct, atol=1e-5)


def test_redfield_trace_and_hermiticity(rng):
    s = build_zoo("redfield")
    assert s.generator_trace_defect() < 1e-12
    assert s.hermiticity_defect() < 1e-12
    for _ in range(3):
        traj = evolve_exact(s, random_mixed_state(rng, 2), TIMES)
        assert traj.max_trace_defect() <= 1e-8


def test_redfield_rejects_slow_tail():
    taus = np.linspace(0, 5, 51)
    bath = BathSpec("correlation", taus, np.exp(-0.1 * taus))
    with pytest.raises(AccuracyError):
        redfield_generator(0.5 * SZ, [SX], bath)
    with pytest.raises(MissingSpectralDataError):
        redfield_generator(0.5 * SZ, [SX], bath, tau_max=6.0)


def test_redfield_is_not_positivity_preserving():
    rep = kossakowski_positivity_check(build_zoo("redfield"))
    assert rep.min_value < -1e-3


# ---------------------------------------------------------------------------
# Davies


def test_davies_matches_laser_at_two_levels():
    w0 = 1.0
    spec = thermal_qubit_spectral()
    d = davies_generator(w0 * B2.conj().T @ B2, [SX], spec, lamb_shift="zero")
    up, down = ohmic_spectral([w0, -w0], 0.1, 3.0, 0.5)
    laser = laser_generator(2, up / 2, down / 2, omega=w0)
    np.testing.assert_allclose(d.superop.mat, to_superop(laser).mat, atol=1e-9)


def test_davies_relaxes_to_gibbs():
    h = 0.5 * SZ
    d = davies_generator(h, [SX], thermal_qubit_spectral(0.5))
    ss = steady_states(d.superop)
    assert len(ss) == 1
    assert trace_distance(ss[0], gibbs_state(h, 0.5)) < 1e-7


def test_davies_is_gkls_and_trace_preserving():
    d = davies_generator(0.5 * SZ, [SX], thermal_qubit_spectral())
    assert d.is_gkls().passed
    assert is_gkls(d.to_gks()).passed
    assert d.superop.generator_trace_defect() < 1e-15
    np.testing.assert_allclose(to_superop(d.to_lindblad()).mat, d.superop.mat, atol=1e-12)


def test_davies_zero_spectrum_is_hamiltonian(rng):
    h = random_hermitian(rng, 3)
    spec = BathSpec("spectral", np.linspace(-10, 10, 41), np.zeros(41))
    d = davies_generator(h, [random_hermitian(rng, 3)], spec)
    np.testing.assert_allclose(d.superop.mat, commutator_superop(h), atol=1e-12)


def test_davies_covariance(rng):
    h = np.diag([0.0, 0.7, 1.9])
    v = random_hermitian(rng, 3)
    spec = ohmic_spectral_table(0.2, 3.0, 0.6, 8.0, 801, include=(0.7, 1.2, 1.9, -0.7, -1.2, -1.9))
    d = davies_generator(h, [v], spec)
    for t, s in [(0.4, 1.3), (2.0, 0.25)]:
        et = propagator(d.superop, t).mat
        u = sprepost(expm(-1j * h * s), expm(1j * h * s))
        assert np.abs(et @ u - u @ et).max() <= 1e-8


def test_davies_bohr_components_sum_to_coupling(rng):
    # degenerate spectrum: two levels within the gap tolerance count as one
    h = np.diag([0.0, 1e-12, 1.0])
    v = random_hermitian(rng, 3)
    spec = thermal_qubit_spectral()
    d = davies_generator(h, [v], spec, lamb_shift="zero")
    np.testing.assert_allclose(d.freqs, [-1.0, 0.0, 1.0], atol=1e-11)
    np.testing.assert_allclose(d.jumps.sum(axis=0)[0], v, atol=1e-14)


def test_davies_missing_spectral_data():
    spec = ohmic_spectral_table(0.1, 3.0, 0.5, 0.5, 11)
    with pytest.raises(MissingSpectralDataError):
        davies_generator(0.5 * SZ, [SX], spec)


def test_principal_value_against_dawson():
    # P int e^{-x^2} / (x - w) dx = -2 sqrt(pi) D(w)
    x = np.linspace(-9, 9, 3601)
    spec = BathSpec("spectral", x, np.exp(-(x**2)))
    for w in (0.0, 0.4, 1.3):
        s = principal_value_shift(spec, 0, 0, w)
        assert s.real == pytest.approx(-2 * np.sqrt(np.pi) * dawsn(w) / (2 * np.pi), abs=1e-8)


def test_supplied_lamb_shift_table():
    spec = thermal_qubit_spectral()
    grid = np.linspace(-3, 3, 13)
    shift = BathSpec("lamb_shift", grid, 0.05 + 0 * grid)
    d = davies_generator(0.5 * SZ, [SX], spec, lamb_shift=shift)
    # sum_w s V(w)^+ V(w) = s (|0><0| + |1><1|) for sx coupling
    np.testing.assert_allclose(d.lamb_shift, 0.05 * np.eye(2), atol=1e-12)


# ---------------------------------------------------------------------------
# Belavin and the Pauli family


def test_belavin_single_operator():
    s = belavin_generator([B2], [[0.7]])
    np.testing.assert_allclose(s.mat, to_superop(landau_generator(2, 0.7)).mat, atol=1e-15)
    assert belavin_is_gkls([[0.7]]).passed
    assert not belavin_is_gkls([[-0.7]]).passed


def test_belavin_pauli_example():
    rates = np.diag([1.0, 1.0, -1.0])
    s = belavin_generator(PAULI, rates)
    np.testing.assert_allclose(s.mat, to_superop(pauli_example_generator(1, 1, -1)).mat, atol=1e-15)
    assert not belavin_is_gkls(rates).passed
    assert not is_gkls(belavin_to_gks(PAULI, rates)).passed
    assert kossakowski_positivity_check(s).passed()


def test_belavin_zero_rates_and_validation():
    np.testing.assert_array_equal(belavin_generator(PAULI, np.zeros((3, 3))).mat, 0)
    with pytest.raises(NonPhysicalInputError):
        belavin_generator(PAULI, np.triu(np.ones((3, 3))))


@pytest.mark.parametrize("gam, gkls, positive", [
    ((1, 1, 1), True, True),
    ((1, 1, -1), False, True),
    ((0, 0, 0), True, True),
    ((1, -2, 0.5), False, False),
])
def test_pauli_family_verdicts(gam, gkls, positive):
    g = pauli_example_generator(*gam)
    assert is_gkls(g).passed is gkls
    assert kossakowski_positivity_check(g).passed() is positive


def test_pauli_zero_is_zero_generator():
    np.testing.assert_array_equal(to_superop(pauli_example_generator(0, 0, 0)).mat, 0)


# ---------------------------------------------------------------------------
# registry


@pytest.mark.parametrize("name", sorted(ZOO))
def test_every_zoo_entry_is_hermiticity_preserving(name):
    s = to_superop(build_zoo(name))
    assert s.hermiticity_defect() <= 1e-10


@pytest.mark.parametrize("name, keeps_trace", [
    ("landau", True), ("laser", True), ("redfield", True), ("davies", True),
    ("belavin", True), ("cured_lamb", True), ("pauli", True),
    ("optical_potential", False), ("lamb", False),
])
def test_zoo_trace_fates(name, keeps_trace):
    s = to_superop(build_zoo(name))
    assert (s.generator_trace_defect() <= 1e-8) is keeps_trace


def test_build_zoo_errors():
    with pytest.raises(KeyError):
        build_zoo("nonexistent")
    with pytest.raises(KeyError):
        build_zoo("landau", {"gama": 1.0})


def test_principal_value_agrees_with_cauchy_weight_quadrature():
    # independent route: QUADPACK's Cauchy-weighted rule on the same spline
    from scipy.integrate import quad

    spec = thermal_qubit_spectral()
    re, _ = spec.scalar(0, 0)
    for w in (-1.9, -0.7, 0.35, 1.2):
        ref = quad(re, spec.grid[0], spec.grid[-1], weight="cauchy", wvar=w, limit=2000)[0] / (2 * np.pi)
        assert principal_value_shift(spec, 0, 0, w).real == pytest.approx(ref, abs=1e-9)
