import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semigroup_forge.basis import gell_mann_basis
from semigroup_forge.errors import (
    InvalidDimensionError,
    InvariantError,
    NonPhysicalInputError,
    NotCompletelyPositiveError,
    NotHermiticityPreservingError,
)
from semigroup_forge.generators import (
    GksGenerator,
    LindbladGenerator,
    Superoperator,
    gks_to_lindblad,
    gks_to_superop,
    is_gkls,
    lindblad_to_gks,
    lindblad_to_superop,
    superop_to_gks,
    to_superop,
    weighted_dissipator_superop,
    weighted_to_gks,
)
from semigroup_forge.zoo import PAULI, pauli_example_generator

from _helpers import ginibre, random_gks, random_hermitian, random_mixed_state


def direct_lindblad(h, jumps, rho):
    out = -1j * (h @ rho - rho @ h)
    for v in jumps:
        vd = v.conj().T
        out += v @ rho @ vd - 0.5 * (vd @ v @ rho + rho @ vd @ v)
    return out


def test_pauli_generator_matches_direct_formula(rng):
    # sum_k g_k (s_k rho s_k - rho) written out by hand
    g = (0.3, -0.2, 1.1)
    rho = random_mixed_state(rng, 2)
    expected = sum(gk * (s @ rho @ s - rho) for gk, s in zip(g, PAULI))
    s = gks_to_superop(pauli_example_generator(*g))
    np.testing.assert_allclose(s(rho), expected, atol=1e-14)


def test_lindblad_superop_matches_operator_form(rng):
    n = 3
    h = random_hermitian(rng, n)
    jumps = [ginibre(rng, n, n) for _ in range(2)]
    rho = random_mixed_state(rng, n)
    s = lindblad_to_superop(LindbladGenerator(h, tuple(jumps)))
    np.testing.assert_allclose(s(rho), direct_lindblad(h, jumps, rho), atol=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_gks_lindblad_superop_agree(rng, n):
    g = random_gks(rng, n)
    lind = gks_to_lindblad(g)
    s1, s2 = gks_to_superop(g), lindblad_to_superop(lind)
    np.testing.assert_allclose(s1.mat, s2.mat, atol=1e-12)
    back = lindblad_to_gks(lind)
    np.testing.assert_allclose(back.C, g.C, atol=1e-12)
    np.testing.assert_allclose(back.H, g.H, atol=1e-12)


@pytest.mark.parametrize("n", [2, 3, 5])
@pytest.mark.parametrize("psd", [True, False])
def test_superop_to_gks_inverts_assembly(rng, n, psd):
    g = random_gks(rng, n, psd=psd)
    back = superop_to_gks(gks_to_superop(g))
    np.testing.assert_allclose(back.C, g.C, atol=1e-12)
    np.testing.assert_allclose(back.H, g.H, atol=1e-12)


def test_identity_parts_of_jumps_move_into_hamiltonian(rng):
    # V -> V + c I with H -> H - (i/2)(conj(c) V - c V^+) leaves L unchanged
    n = 3
    h = random_hermitian(rng, n)
    v = ginibre(rng, n, n)
    c = 0.7 - 0.4j
    shifted_h = h - 0.5j * (np.conj(c) * v - c * v.conj().T)
    a = lindblad_to_superop(LindbladGenerator(h, (v,)))
    b = lindblad_to_superop(LindbladGenerator(shifted_h, (v + c * np.eye(n),)))
    np.testing.assert_allclose(a.mat, b.mat, atol=1e-12)
    ga, gb = lindblad_to_gks(LindbladGenerator(h, (v,))), lindblad_to_gks(
        LindbladGenerator(shifted_h, (v + c * np.eye(n),))
    )
    np.testing.assert_allclose(ga.C, gb.C, atol=1e-12)
    np.testing.assert_allclose(ga.H, gb.H, atol=1e-12)


def test_unitary_mixing_of_jumps_is_a_gauge(rng):
    n = 2
    jumps = np.array([ginibre(rng, n, n) for _ in range(3)])
    u, _ = np.linalg.qr(ginibre(rng, 3, 3))
    mixed = np.einsum("ij,jab->iab", u, jumps)
    h = random_hermitian(rng, n)
    a = lindblad_to_superop(LindbladGenerator(h, tuple(jumps)))
    b = lindblad_to_superop(LindbladGenerator(h, tuple(mixed)))
    np.testing.assert_allclose(a.mat, b.mat, atol=1e-12)


def test_weighted_form_reduces_to_lindblad_for_identity_weights(rng):
    n = 3
    ops = np.array([ginibre(rng, n, n) for _ in range(2)])
    d = weighted_dissipator_superop(ops, np.eye(2))
    s = lindblad_to_superop(LindbladGenerator(np.zeros((n, n)), tuple(ops)))
    np.testing.assert_allclose(d, s.mat, atol=1e-12)


def test_weighted_to_gks_matches_weighted_superop(rng):
    n = 2
    ops = [ginibre(rng, n, n) for _ in range(3)]
    w = random_hermitian(rng, 3)
    h = random_hermitian(rng, n)
    g = weighted_to_gks(h, ops, w)
    expected = Superoperator(-1j * (np.kron(np.eye(n), h) - np.kron(h.T, np.eye(n))) + weighted_dissipator_superop(ops, w))
    np.testing.assert_allclose(gks_to_superop(g).mat, expected.mat, atol=1e-12)


def test_is_gkls_reports_min_eigenvalue():
    v = is_gkls(pauli_example_generator(1, 1, -1))
    assert not v.passed
    assert v.value == pytest.approx(-2.0)
    v = is_gkls(pauli_example_generator(1, 1, 1))
    assert v.passed and v.value == pytest.approx(2.0)


def test_gks_to_lindblad_refuses_indefinite():
    with pytest.raises(NotCompletelyPositiveError) as info:
        gks_to_lindblad(pauli_example_generator(1, 1, -1))
    assert info.value.eigenvalue == pytest.approx(-2.0)


def test_zero_generator_has_no_jumps():
    g = GksGenerator.from_matrices(np.zeros((3, 3)), np.zeros((8, 8)))
    assert gks_to_lindblad(g).jumps == ()
    np.testing.assert_array_equal(gks_to_superop(g).mat, 0)


def test_superop_to_gks_rejects_non_trace_preserving():
    s = Superoperator(-np.eye(4, dtype=complex))
    with pytest.raises(NonPhysicalInputError):
        superop_to_gks(s)


def test_superop_to_gks_rejects_non_hermiticity_preserving():
    # rho -> i rho breaks Hermiticity
    with pytest.raises(NotHermiticityPreservingError):
        superop_to_gks(Superoperator(1j * np.eye(4)))


def test_generator_invariants():
    b = gell_mann_basis(2)
    with pytest.raises(InvariantError):
        GksGenerator(np.array([[0, 1], [0, 0]], dtype=complex), np.zeros((3, 3)), b)
    with pytest.raises(InvariantError):
        GksGenerator(np.eye(2, dtype=complex), np.zeros((3, 3)), b)
    with pytest.raises(InvariantError):
        GksGenerator(np.zeros((2, 2)), np.triu(np.ones((3, 3))), b)
    with pytest.raises(InvalidDimensionError):
        GksGenerator(np.zeros((2, 2)), np.zeros((8, 8)), b)
    with pytest.raises(InvalidDimensionError):
        LindbladGenerator(np.zeros((2, 2)), (np.zeros((3, 3)),))


def test_superoperator_checks():
    s = to_superop(pauli_example_generator(1, 2, 3))
    assert s.is_hermiticity_preserving().passed
    assert s.is_trace_preserving_generator().passed
    assert Superoperator.identity(2).channel_trace_defect() == 0
    assert Superoperator.identity(2).generator_trace_defect() == 1
    with pytest.raises(InvalidDimensionError):
        Superoperator(np.zeros((3, 3)))


def test_adjoint_is_heisenberg_dual(rng):
    s = gks_to_superop(random_gks(rng, 3))
    a, rho = random_hermitian(rng, 3), random_mixed_state(rng, 3)
    lhs = np.trace(a @ s(rho))
    rhs = np.trace(s.adjoint()(a).conj().T @ rho)
    assert lhs == pytest.approx(rhs, abs=1e-12)


hermitian_entries = st.floats(-2, 2, allow_nan=False)


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(2, 4),
    seed=st.integers(0, 2**32 - 1),
    psd=st.booleans(),
    h_scale=hermitian_entries,
)
def test_property_assembly_is_hermiticity_and_trace_preserving(n, seed, psd, h_scale):
    rng = np.random.default_rng(seed)
    g = random_gks(rng, n, psd=psd)
    g = GksGenerator(h_scale * g.H, g.C, g.basis)
    s = gks_to_superop(g)
    assert s.hermiticity_defect() < 1e-12
    assert s.generator_trace_defect() < 1e-12
    back = superop_to_gks(s)
    np.testing.assert_allclose(back.C, g.C, atol=1e-11)
    np.testing.assert_allclose(back.H, g.H, atol=1e-11)
    assert is_gkls(g).passed == bool(np.linalg.eigvalsh(g.C)[0] >= -1e-9)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), rank=st.integers(1, 3))
def test_property_lindblad_roundtrip_low_rank(seed, rank):
    rng = np.random.default_rng(seed)
    g = random_gks(rng, 2, rank=rank)
    lind = gks_to_lindblad(g)
    assert len(lind.jumps) <= rank
    np.testing.assert_allclose(lindblad_to_superop(lind).mat, gks_to_superop(g).mat, atol=1e-12)
