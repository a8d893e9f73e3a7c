"""Complete positivity: Choi matrices, Kraus and Stinespring forms, block
positivity, and the dynamical-matrix (realignment) formalism.

Choi convention (unnormalized)::

    Choi(Phi) = sum_ij |i><j| (x) Phi(|i><j|),   index (i, a) -> i*N + a

The normalized version with the maximally entangled projector is
``Choi(Phi) / N``; positivity verdicts are unaffected.

Dynamical matrices use row-major pair indices:
``A[r*N + s, r'*N + s'] = A_{rs,r's'}`` with
``rho_rs(t) = sum A_{rs,r's'} rho_r's'(0)`` and
``B[r*N + r', s*N + s'] = A_{rs,r's'}``.
"""
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import (
    BlockPositivityGapError,
    InvalidDimensionError,
    NotCompletelyPositiveError,
    NotHermiticityPreservingError,
)
from .generators import Superoperator, Verdict
from .linalg import dag, herm, norm_scale

DEFAULT_SEED = 1976
HERMITICITY_TOL = 1e-9


def _readonly(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def _fix_phase(m):
    """Rotate the global phase so the largest-modulus entry is real positive."""
    flat = m.reshape(-1)
    k = int(np.argmax(np.abs(flat)))
    if abs(flat[k]) == 0:
        return m
    return m * (abs(flat[k]) / flat[k])


def _dim_of(n2):
    n = int(round(np.sqrt(n2)))
    if n * n != n2:
        raise InvalidDimensionError(f"{n2} is not a square dimension")
    return n


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    mat: np.ndarray

    def __post_init__(self):
        m = _readonly(self.mat)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidDimensionError(f"Choi matrix must be square, got {m.shape}")
        _dim_of(m.shape[0])
        object.__setattr__(self, "mat", m)

    @property
    def dim(self):
        return _dim_of(self.mat.shape[0])

    def normalized(self):
        """The same matrix in the ``(id (x) Phi) P+`` convention."""
        return self.mat / self.dim


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Operators ``K_a`` with ``Phi(rho) = sum_a K_a rho K_a^+``."""

    ops: tuple

    def __post_init__(self):
        ops = tuple(_readonly(k) for k in self.ops)
        if not ops:
            raise InvalidDimensionError("a Kraus set needs at least one operator")
        shape = ops[0].shape
        if any(k.shape != shape or shape[0] != shape[1] for k in ops):
            raise InvalidDimensionError("Kraus operators must be square and of equal size")
        object.__setattr__(self, "ops", ops)

    @property
    def dim(self):
        return self.ops[0].shape[0]

    def __len__(self):
        return len(self.ops)

    def __call__(self, rho):
        return sum(k @ rho @ dag(k) for k in self.ops)

    def completeness(self):
        return sum(dag(k) @ k for k in self.ops)

    def trace_defect(self):
        """Spectral norm of ``sum K^+ K - I``."""
        return float(np.linalg.norm(self.completeness() - np.eye(self.dim), 2))


@dataclass(frozen=True, eq=False)
class DynamicalMatrixPair:
    A: np.ndarray
    B: np.ndarray

    @property
    def dim(self):
        return _dim_of(self.A.shape[0])


@dataclass(frozen=True)
class BlockPositivityResult:
    """Outcome of the product-vector minimization.

    ``min_value`` is an upper bound on the true minimum (a heuristic search);
    ``grid_min`` is the Bloch-sphere cross-check, only filled in for qubits.
    """

    min_value: float
    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    restarts: int
    grid_min: float = None
    heuristic: bool = True

    def verdict(self, tol=1e-9):
        return Verdict(self.min_value >= -tol, self.min_value)


# ---------------------------------------------------------------------------
# Choi <-> superoperator <-> Kraus


def choi_of_superop(s):
    s = s if isinstance(s, Superoperator) else Superoperator(s)
    n = s.dim
    # m4[b, a, j, i] = Phi(|i><j|)[a, b]
    m4 = s.mat.reshape(n, n, n, n)
    return ChoiMatrix(m4.transpose(3, 1, 2, 0).reshape(n * n, n * n))


def superop_of_choi(c):
    n = c.dim
    c4 = np.asarray(c.mat).reshape(n, n, n, n)  # [i, a, j, b]
    return Superoperator(c4.transpose(3, 1, 2, 0).reshape(n * n, n * n))


def choi_from_kraus(k):
    vs = np.array([np.asarray(op).T.reshape(-1) for op in k.ops])
    return ChoiMatrix(vs.T @ vs.conj())


def superop_from_kraus(k):
    return Superoperator(sum(np.kron(op.conj(), op) for op in k.ops))


def is_completely_positive(c, tol=1e-9):
    """``Verdict(min_eig >= -tol * max(1, ||C||_F), min_eig)``.

    Raises :class:`NotHermiticityPreservingError` when the Choi matrix is not
    Hermitian to within ``1e-9`` (relative).
    """
    m = np.asarray(c.mat)
    scale = norm_scale(m)
    hd = float(np.max(np.abs(m - dag(m))))
    if hd > HERMITICITY_TOL * scale:
        raise NotHermiticityPreservingError(
            f"Choi matrix not Hermitian (defect {hd:.3g}); map is not Hermiticity preserving"
        )
    lam = float(np.linalg.eigvalsh(herm(m))[0])
    return Verdict(lam >= -tol * scale, lam)


def kraus_from_choi(c, tol=1e-9):
    """Canonical Kraus operators ``sqrt(lambda) unvec(v)`` from the Choi
    eigen-decomposition; at most ``N**2`` of them."""
    n = c.dim
    m = herm(np.asarray(c.mat))
    scale = norm_scale(m)
    lam, v = np.linalg.eigh(m)
    if lam[0] < -tol * scale:
        raise NotCompletelyPositiveError("Choi matrix is not positive semidefinite", lam[0])
    keep = np.flatnonzero(lam > tol * scale)
    if keep.size == 0:
        return KrausSet((np.zeros((n, n), dtype=complex),))
    # v[i*N + a] = K[a, i]
    ops = [_fix_phase(np.sqrt(lam[j]) * v[:, j].reshape(n, n).T) for j in keep[::-1]]
    return KrausSet(tuple(ops))


def stinespring_dilate(k):
    """Stack the Kraus operators into ``V: C^N -> C^r (x) C^N``.

    ``Phi(rho) = Tr_env(V rho V^+)`` with the environment as the first factor,
    and ``V^+ V = sum K^+ K``.
    """
    v = np.vstack([np.asarray(op) for op in k.ops])
    return v, len(k.ops)


def stinespring_apply(v, env_dim, rho):
    n = v.shape[1]
    big = v @ rho @ dag(v)
    return np.einsum("eaeb->ab", big.reshape(env_dim, n, env_dim, n))


def isometry_defect(v):
    return float(np.linalg.norm(dag(v) @ v - np.eye(v.shape[1]), 2))


# ---------------------------------------------------------------------------
# positivity of the map itself


def _random_unit(rng, shape):
    z = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def block_positivity_grid(c, points=129):
    """Exhaustive qubit check: ``x`` on a ``points x points`` Bloch-sphere grid,
    exact minimization over ``y`` for each."""
    m = np.asarray(c.mat)
    if m.shape != (4, 4):
        raise InvalidDimensionError("grid cross-check is defined for qubit maps only")
    theta = np.linspace(0.0, np.pi, points)
    phase = np.linspace(0.0, 2.0 * np.pi, points)
    th, ph = np.meshgrid(theta, phase, indexing="ij")
    x = np.stack([np.cos(th / 2), np.exp(1j * ph) * np.sin(th / 2)], axis=-1).reshape(-1, 2)
    c4 = m.reshape(2, 2, 2, 2)
    mx = np.einsum("ri,iajb,rj->rab", x.conj(), c4, x)
    return float(np.linalg.eigvalsh(herm(mx))[:, 0].min())


def block_positivity_min(c, budget=64, seed=DEFAULT_SEED, dims=None, grid_points=129):
    """Approximate ``min <x (x) y| C |x (x) y>`` over unit ``x``, ``y``.

    Multi-start alternating minimization: for fixed ``x`` the best ``y`` is the
    lowest eigenvector of the contracted ``N x N`` matrix, and vice versa.
    ``budget`` is the number of random restarts. The result is an upper bound
    on the true minimum; block positivity is NP-hard in general.
    """
    m = herm(np.asarray(c.mat if hasattr(c, "mat") else c))
    n1, n2 = dims if dims is not None else (_dim_of(m.shape[0]),) * 2
    rng = np.random.default_rng(seed)
    xs = _random_unit(rng, (budget, n1))
    ys = _random_unit(rng, (budget, n2))
    ftol = 1e-15 * norm_scale(m)
    vals, bx, by = _kernels.product_descent(m, n1, n2, xs, ys, 200, ftol)
    best = int(np.argmin(vals))
    grid = block_positivity_grid(ChoiMatrix(m), grid_points) if (n1, n2) == (2, 2) else None
    return BlockPositivityResult(float(vals[best]), bx[best], by[best], budget, grid)


def apply_ampliation(s, k, x):
    """Batched ``(id_k (x) Phi)(X)`` for ``X`` of shape ``(..., kN, kN)``."""
    n = s.dim
    x4 = np.asarray(x).reshape(-1, k, n, k, n)
    m4 = np.asarray(s.mat).reshape(n, n, n, n)  # [b, a, d, c]
    out = np.einsum("badc,rpcqd->rpaqb", m4, x4)
    return out.reshape(x.shape)


def k_positivity_oracle(s, k, samples=1000, seed=DEFAULT_SEED):
    """Monte-Carlo evidence for ``k``-positivity.

    Draws random unit ``|w>`` in ``C^k (x) C^N`` and returns the smallest value
    of ``<z| (id_k (x) Phi)(|w><w|) |z>`` found, where for each ``w`` both a
    random ``z`` and the minimizing ``z`` (lowest eigenvector) are tried.
    A negative value disproves ``k``-positivity; a nonnegative one is only
    evidence.
    """
    s = s if isinstance(s, Superoperator) else Superoperator(s)
    if k < 1:
        raise InvalidDimensionError("k must be >= 1")
    n = s.dim
    rng = np.random.default_rng(seed)
    best = np.inf
    chunk = 512
    for start in range(0, samples, chunk):
        r = min(chunk, samples - start)
        w = _random_unit(rng, (r, k * n))
        z = _random_unit(rng, (r, k * n))
        out = apply_ampliation(s, k, w[:, :, None] * w[:, None, :].conj())
        rand_vals = np.einsum("ra,rab,rb->r", z.conj(), out, z).real
        eig_vals = np.linalg.eigvalsh(herm(out))[:, 0]
        best = min(best, float(rand_vals.min()), float(eig_vals.min()))
    return best


# ---------------------------------------------------------------------------
# dynamical matrices


def evolution_matrix(s):
    """``A_{rs,r's'}`` (row-major pairs) of a superoperator."""
    n = s.dim
    m4 = np.asarray(s.mat).reshape(n, n, n, n)  # [s, r, s', r']
    return m4.transpose(1, 0, 3, 2).reshape(n * n, n * n)


def superop_of_evolution_matrix(a):
    a = np.asarray(a)
    n = _dim_of(a.shape[0])
    return Superoperator(a.reshape(n, n, n, n).transpose(1, 0, 3, 2).reshape(n * n, n * n))


def realign(a):
    """``B_{rr',ss'} = A_{rs,r's'}``, a pure index permutation."""
    a = np.asarray(a)
    n = _dim_of(a.shape[0])
    b = a.reshape(n, n, n, n).transpose(0, 2, 1, 3).reshape(n * n, n * n)
    return DynamicalMatrixPair(_readonly(a), _readonly(b))


def unrealign(b):
    """Inverse of :func:`realign` (the same permutation; it is an involution)."""
    b = np.asarray(b)
    n = _dim_of(b.shape[0])
    return b.reshape(n, n, n, n).transpose(0, 2, 1, 3).reshape(n * n, n * n)


def smr_conditions_A(a, tol=1e-9, budget=64, seed=DEFAULT_SEED):
    """Check the three conditions on an evolution matrix ``A``.

    * Hermiticity: ``A_{sr,s'r'} = conj(A_{rs,r's'})``;
    * positivity: ``sum conj(x_r) x_s A_{rs,r's'} y_r' conj(y_s') >= 0``, i.e.
      block positivity of ``B``;
    * trace preservation: ``sum_r A_{rr,r's'} = delta_{r's'}``.

    Also reports the stronger ``B >= 0`` (complete positivity) so both the
    block-positive and the positive-semidefinite readings are visible.
    """
    a = np.asarray(a, dtype=complex)
    n = _dim_of(a.shape[0])
    a4 = a.reshape(n, n, n, n)
    herm_defect = float(np.max(np.abs(a4.transpose(1, 0, 3, 2) - a4.conj())))
    trace_defect = float(np.max(np.abs(np.einsum("rrpq->pq", a4) - np.eye(n))))
    b = realign(a).B
    block = block_positivity_min(b, budget=budget, seed=seed)
    psd_min = float(np.linalg.eigvalsh(herm(b))[0])
    scale = norm_scale(b)
    return {
        "hermiticity_defect": herm_defect,
        "hermiticity": herm_defect <= tol * scale,
        "block_positivity_min": block.min_value,
        "block_positivity_grid_min": block.grid_min,
        "positivity": block.min_value >= -tol * scale,
        "trace_defect": trace_defect,
        "trace_preservation": trace_defect <= tol * scale,
        "psd_min_eigenvalue": psd_min,
        "complete_positivity": psd_min >= -tol * scale,
        "heuristic": True,
    }


def smr_decompose(b, tol=1e-9):
    """Write ``B = sum_a mu_a vec(W_a) vec(W_a)^+`` with ``mu_a > 0``.

    Returns ``(mu, W)`` with ``W`` of shape ``(r, N, N)`` so that the evolution
    is ``rho -> sum mu_a W_a rho W_a^+``. Exists exactly when ``B`` is positive
    semidefinite; a merely block-positive ``B`` raises
    :class:`BlockPositivityGapError`.
    """
    b = herm(np.asarray(b, dtype=complex))
    n = _dim_of(b.shape[0])
    scale = norm_scale(b)
    lam, v = np.linalg.eigh(b)
    if lam[0] < -tol * scale:
        raise BlockPositivityGapError(
            "dynamical matrix is not positive semidefinite, so it has no "
            "mu_a W_a (x) conj(W_a) decomposition even if it is block positive",
            lam[0],
        )
    keep = np.flatnonzero(lam > tol * scale)[::-1]
    mu = lam[keep]
    # W[r, r'] = v[r*N + r']
    w = np.array([_fix_phase(v[:, j].reshape(n, n)) for j in keep])
    return mu, w


def apply_smr(mu, w, rho):
    return sum(m * wa @ rho @ dag(wa) for m, wa in zip(mu, w))
