"""Generators of quantum dynamical semigroups in GKS form, Lindblad form and as
explicit superoperator matrices, with conversions between them.

GKS form, for an orthonormal traceless basis ``F_k``::

    L(rho) = -i[H, rho] + 1/2 sum_kl C_kl ([F_k, rho F_l^+] + [F_k rho, F_l^+])

Lindblad form::

    L(rho) = -i[H, rho] + sum_j (V_j rho V_j^+ - 1/2 {V_j^+ V_j, rho})

The two coincide when ``C_kl = sum_j a_jk conj(a_jl)`` for the traceless parts
``V_j - tr(V_j)/N = sum_k a_jk F_k``.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .basis import OperatorBasis, expand, gell_mann_basis
from .errors import (
    InvalidDimensionError,
    InvariantError,
    NotCompletelyPositiveError,
    NotHermiticityPreservingError,
    NonPhysicalInputError,
)
from .linalg import (
    commutator_superop,
    dag,
    herm,
    norm_scale,
    spost,
    spre,
    stacking_swap,
    unvec,
    vec,
)

INVARIANT_TOL = 1e-12
EIG_CUTOFF = 1e-12


class Verdict(NamedTuple):
    """A yes/no answer together with the number that decided it."""

    passed: bool
    value: float


def _readonly(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Superoperator:
    """``N**2 x N**2`` matrix acting on column-stacked ``N x N`` matrices."""

    mat: np.ndarray

    def __post_init__(self):
        m = _readonly(self.mat)
        n2 = m.shape[0]
        n = int(round(np.sqrt(n2)))
        if m.ndim != 2 or m.shape[1] != n2 or n * n != n2:
            raise InvalidDimensionError(f"superoperator must be N^2 x N^2, got {m.shape}")
        object.__setattr__(self, "mat", m)

    @property
    def dim(self):
        return int(round(np.sqrt(self.mat.shape[0])))

    def __call__(self, rho):
        return unvec(self.mat @ vec(rho), self.dim)

    def __matmul__(self, other):
        return Superoperator(self.mat @ other.mat)

    def __add__(self, other):
        return Superoperator(self.mat + other.mat)

    def scaled(self, c):
        return Superoperator(c * self.mat)

    def adjoint(self):
        """Heisenberg-picture dual with respect to ``tr(A^+ B)``."""
        return Superoperator(self.mat.conj().T)

    def trace_functional(self):
        """Row vector ``rho -> tr(L rho)``."""
        return vec(np.eye(self.dim)).conj() @ self.mat

    def generator_trace_defect(self):
        """``max |tr L(E_ab)|``; zero iff ``tr(L rho) = 0`` for every rho."""
        return float(np.max(np.abs(self.trace_functional())))

    def channel_trace_defect(self):
        """``max |tr Phi(E_ab) - delta_ab|``; zero iff the map is trace preserving."""
        return float(np.max(np.abs(self.trace_functional() - vec(np.eye(self.dim)))))

    def hermiticity_defect(self):
        """``max |M - S conj(M) S|`` with ``S`` the stacking swap."""
        s = stacking_swap(self.dim)
        return float(np.max(np.abs(self.mat - s @ self.mat.conj() @ s)))

    def is_hermiticity_preserving(self, tol=1e-10):
        d = self.hermiticity_defect()
        return Verdict(d <= tol * norm_scale(self.mat), d)

    def is_trace_preserving_generator(self, tol=1e-10):
        d = self.generator_trace_defect()
        return Verdict(d <= tol * norm_scale(self.mat), d)

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n * n, dtype=complex))

    @classmethod
    def zero(cls, n):
        return cls(np.zeros((n * n, n * n), dtype=complex))


@dataclass(frozen=True, eq=False)
class GksGenerator:
    """Hamiltonian, Kossakowski matrix and the basis they refer to.

    ``C`` need not be positive semidefinite; use :func:`is_gkls` to ask.
    """

    H: np.ndarray
    C: np.ndarray
    basis: OperatorBasis

    def __post_init__(self):
        h, c = _readonly(self.H), _readonly(self.C)
        n = self.basis.dim
        if h.shape != (n, n) or c.shape != (n * n - 1, n * n - 1):
            raise InvalidDimensionError(
                f"H {h.shape} / C {c.shape} inconsistent with basis dimension {n}"
            )
        if np.max(np.abs(h - dag(h))) > INVARIANT_TOL * norm_scale(h):
            raise InvariantError("Hamiltonian is not Hermitian")
        if abs(np.trace(h)) > INVARIANT_TOL * norm_scale(h):
            raise InvariantError("Hamiltonian of a GKS generator must be traceless")
        if np.max(np.abs(c - dag(c)), initial=0.0) > INVARIANT_TOL * norm_scale(c):
            raise InvariantError("Kossakowski matrix is not Hermitian")
        object.__setattr__(self, "H", h)
        object.__setattr__(self, "C", c)

    @property
    def dim(self):
        return self.basis.dim

    @classmethod
    def from_matrices(cls, H, C, basis=None):
        H = np.asarray(H, dtype=complex)
        return cls(H, C, basis if basis is not None else gell_mann_basis(H.shape[0]))


@dataclass(frozen=True, eq=False)
class LindbladGenerator:
    """Hamiltonian plus a (possibly empty) list of jump operators."""

    H: np.ndarray
    jumps: tuple = ()

    def __post_init__(self):
        h = _readonly(self.H)
        n = h.shape[0]
        if h.shape != (n, n):
            raise InvalidDimensionError(f"Hamiltonian must be square, got {h.shape}")
        if np.max(np.abs(h - dag(h)), initial=0.0) > INVARIANT_TOL * norm_scale(h):
            raise InvariantError("Hamiltonian is not Hermitian")
        jumps = tuple(_readonly(v) for v in self.jumps)
        for v in jumps:
            if v.shape != (n, n):
                raise InvalidDimensionError(f"jump operator shape {v.shape} != {(n, n)}")
        object.__setattr__(self, "H", h)
        object.__setattr__(self, "jumps", jumps)

    @property
    def dim(self):
        return self.H.shape[0]


# ---------------------------------------------------------------------------
# assembly


def weighted_dissipator_superop(ops, weights):
    """Superoperator of ``sum_ij W_ij (A_i rho A_j^+ - 1/2 {A_j^+ A_i, rho})``."""
    ops = np.asarray(ops, dtype=complex)
    w = np.asarray(weights, dtype=complex)
    m, n, _ = ops.shape
    # sum_ij W_ij kron(conj(A_j), A_i), index (a, c), (b, d)
    jump = np.einsum("ij,jab,icd->acbd", w, ops.conj(), ops).reshape(n * n, n * n)
    g = np.einsum("ij,jba,ibc->ac", w, ops.conj(), ops)
    return jump - 0.5 * spre(g) - 0.5 * spost(g)


def gks_to_superop(g):
    """Explicit matrix of a GKS-form generator."""
    f = g.basis.elements
    n = g.dim
    c = g.C
    jump = np.einsum("kl,lab,kcd->acbd", c, f.conj(), f).reshape(n * n, n * n)
    # sum_kl c_kl F_l^+ F_k
    q = np.einsum("kl,lba,kbc->ac", c, f.conj(), f)
    mat = commutator_superop(g.H) + jump - 0.5 * spre(q) - 0.5 * spost(q)
    return Superoperator(mat)


def lindblad_to_superop(g):
    mat = commutator_superop(g.H)
    for v in g.jumps:
        vv = dag(v) @ v
        mat = mat + np.kron(v.conj(), v) - 0.5 * spre(vv) - 0.5 * spost(vv)
    return Superoperator(mat)


def to_superop(g):
    """Dispatch on generator type; superoperators pass through unchanged."""
    if isinstance(g, Superoperator):
        return g
    if isinstance(g, GksGenerator):
        return gks_to_superop(g)
    if isinstance(g, LindbladGenerator):
        return lindblad_to_superop(g)
    raise TypeError(f"not a generator: {type(g).__name__}")


# ---------------------------------------------------------------------------
# conversions


def is_gkls(g, tol=1e-9):
    """Whether the Kossakowski matrix is positive semidefinite.

    Returns ``Verdict(passed, min_eigenvalue)``; ``passed`` iff
    ``min_eigenvalue >= -tol``.
    """
    if len(g.C) == 0:
        return Verdict(True, 0.0)
    lam = float(np.linalg.eigvalsh(g.C)[0])
    return Verdict(lam >= -tol, lam)


def gks_to_lindblad(g, tol=1e-9, cutoff=EIG_CUTOFF):
    """Jump operators from the eigen-decomposition of the Kossakowski matrix.

    ``V_j = sqrt(lambda_j) sum_k u_jk F_k``; eigenvalues below ``cutoff`` are
    dropped. Raises :class:`NotCompletelyPositiveError` if an eigenvalue is
    below ``-tol``.
    """
    lam, u = np.linalg.eigh(g.C)
    if lam.size and lam[0] < -tol:
        raise NotCompletelyPositiveError(
            "Kossakowski matrix is not positive semidefinite; no Lindblad form exists",
            lam[0],
        )
    jumps = [
        np.sqrt(lam[j]) * np.einsum("k,kab->ab", u[:, j], g.basis.elements)
        for j in range(lam.size)
        if lam[j] > cutoff
    ]
    return LindbladGenerator(np.array(g.H), tuple(jumps))


def weighted_to_gks(H, ops, weights, basis=None):
    """GKS form of ``-i[H, .] + sum_ij W_ij (A_i . A_j^+ - 1/2 {A_j^+ A_i, .})``
    for a Hermitian weight matrix ``W``.

    Identity components ``m_i I`` of the ``A_i`` are folded into the
    Hamiltonian: they contribute ``[K, rho]`` with
    ``K = 1/2 sum_ij W_ij (conj(m_j) A'_i - m_i A'_j^+)``, which is
    anti-Hermitian, so ``H -> H + iK``.
    """
    H = np.asarray(H, dtype=complex)
    n = H.shape[0]
    if basis is None:
        basis = gell_mann_basis(n)
    if basis.dim != n:
        raise InvalidDimensionError(f"basis dimension {basis.dim} != {n}")
    w = np.asarray(weights, dtype=complex)
    ops = [np.asarray(a, dtype=complex) for a in ops]
    if not ops:
        h = H - np.trace(H) / n * np.eye(n)
        return GksGenerator(herm(h), np.zeros((n * n - 1, n * n - 1), dtype=complex), basis)
    if np.max(np.abs(w - dag(w))) > INVARIANT_TOL * norm_scale(w):
        raise NotHermiticityPreservingError("weight matrix must be Hermitian")
    m = np.empty(len(ops), dtype=complex)
    a = np.empty((len(ops), n * n - 1), dtype=complex)
    for i, op in enumerate(ops):
        c0, coeffs = expand(op, basis)
        m[i] = c0 / np.sqrt(n)
        a[i] = coeffs
    traceless = np.array([op - m[i] * np.eye(n) for i, op in enumerate(ops)])
    k = 0.5 * (
        np.einsum("ij,j,iab->ab", w, m.conj(), traceless)
        - np.einsum("ij,i,jba->ab", w, m, traceless.conj())
    )
    h = H + 1j * k
    h = herm(h - np.trace(h) / n * np.eye(n))
    c = herm(np.einsum("ij,ik,jl->kl", w, a, a.conj()))
    return GksGenerator(h, c, basis)


def lindblad_to_gks(g, basis=None):
    """Kossakowski matrix and traceless Hamiltonian of a Lindblad generator."""
    return weighted_to_gks(g.H, list(g.jumps), np.eye(len(g.jumps)), basis)


def superop_to_gks(s, basis=None, tol=1e-10):
    """Recover ``(H, C)`` from an explicit generator matrix.

    The superoperator is expanded as ``sum_ab chi_ab G_a rho G_b^+`` over the
    orthonormal operator basis ``G_0 = I/sqrt(N)``, ``G_k = F_k``; then
    ``C = chi[1:, 1:]`` and the Hamiltonian is read off the ``chi_k0`` column.
    Requires a trace- and Hermiticity-preserving generator.
    """
    s = s if isinstance(s, Superoperator) else Superoperator(s)
    n = s.dim
    if basis is None:
        basis = gell_mann_basis(n)
    scale = norm_scale(s.mat)
    hp = s.hermiticity_defect()
    if hp > tol * scale:
        raise NotHermiticityPreservingError(
            f"generator is not Hermiticity preserving (defect {hp:.3g})"
        )
    tp = s.generator_trace_defect()
    if tp > tol * scale:
        raise NonPhysicalInputError(
            f"generator is not trace preserving (defect {tp:.3g}); no GKS form exists"
        )
    g = np.concatenate([np.eye(n)[None] / np.sqrt(n), basis.elements])
    # chi_ab = <kron(conj(G_b), G_a), M>_HS
    # row a + N*b of the matrix is element (a, b): m4[b_out, a_out, b_in, a_in]
    m4 = s.mat.reshape(n, n, n, n)
    chi = np.einsum("aqt,bps,pqst->ab", g.conj(), g, m4)
    c = herm(chi[1:, 1:])
    # A = chi_00/(2N) I + sum_k chi_k0 F_k / sqrt(N);  H = i (A - A^+)/2
    amat = chi[0, 0] / (2 * n) * np.eye(n) + np.einsum("k,kab->ab", chi[1:, 0], basis.elements) / np.sqrt(n)
    h = 0.5j * (amat - dag(amat))
    h = herm(h - np.trace(h) / n * np.eye(n))
    return GksGenerator(h, c, basis)
