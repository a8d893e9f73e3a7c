"""Orthonormal traceless Hermitian operator bases (generalized Gell-Mann)."""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidDimensionError

BASIS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class OperatorBasis:
    """``N**2 - 1`` traceless Hermitian ``N x N`` matrices, orthonormal in the
    Hilbert-Schmidt inner product.

    ``elements`` has shape ``(N**2 - 1, N, N)`` and is read-only.
    """

    dim: int
    elements: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        el = np.array(self.elements, dtype=complex)
        if el.shape != (self.dim**2 - 1, self.dim, self.dim):
            raise InvalidDimensionError(
                f"expected {self.dim**2 - 1} matrices of size {self.dim}, got {el.shape}"
            )
        el.setflags(write=False)
        object.__setattr__(self, "elements", el)

    def __len__(self):
        return self.elements.shape[0]

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, k):
        return self.elements[k]

    def gram(self):
        """Matrix of ``tr(F_k F_l^dagger)``."""
        el = self.elements
        return np.einsum("kab,lab->kl", el, el.conj())

    def verify(self, tol=BASIS_TOL):
        """Largest violation of tracelessness and of orthonormality."""
        traces = np.abs(np.einsum("kaa->k", self.elements))
        ortho = np.abs(self.gram() - np.eye(len(self)))
        return float(traces.max(initial=0.0)), float(ortho.max(initial=0.0))

    def is_valid(self, tol=BASIS_TOL):
        tr, orth = self.verify()
        return tr <= tol and orth <= tol


@lru_cache(maxsize=32)
def gell_mann_basis(n):
    """Generalized Gell-Mann matrices of dimension ``n``, normalized to unit
    Hilbert-Schmidt norm.

    Order: all symmetric ``(E_jk + E_kj)/sqrt2`` for ``j < k`` (lexicographic),
    then the antisymmetric ``(-i E_jk + i E_kj)/sqrt2`` in the same order, then
    the ``n - 1`` diagonal ones. For ``n = 2`` this is ``sigma_{x,y,z}/sqrt2``.
    """
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidDimensionError(f"basis dimension must be an integer >= 2, got {n!r}")
    n = int(n)
    pairs = [(j, k) for j in range(n) for k in range(j + 1, n)]
    mats = []
    for j, k in pairs:
        m = np.zeros((n, n), dtype=complex)
        m[j, k] = m[k, j] = 1.0
        mats.append(m / np.sqrt(2))
    for j, k in pairs:
        m = np.zeros((n, n), dtype=complex)
        m[j, k] = -1j
        m[k, j] = 1j
        mats.append(m / np.sqrt(2))
    for l in range(1, n):
        d = np.zeros(n)
        d[:l] = 1.0
        d[l] = -l
        mats.append(np.diag(d / np.sqrt(l * (l + 1))).astype(complex))
    return OperatorBasis(n, np.array(mats), name="gell-mann")


def expand(x, basis):
    """Coefficients of ``x`` in ``{I/sqrt(N)} + basis``.

    Returns ``(c0, coeffs)`` with ``x = c0 I/sqrt(N) + sum_k coeffs[k] F_k``.
    """
    x = np.asarray(x, dtype=complex)
    n = basis.dim
    if x.shape != (n, n):
        raise InvalidDimensionError(f"operator shape {x.shape} does not match basis dimension {n}")
    c0 = np.trace(x) / np.sqrt(n)
    coeffs = np.einsum("kab,ab->k", basis.elements.conj(), x)
    return c0, coeffs


def reconstruct(c0, coeffs, basis):
    n = basis.dim
    return c0 * np.eye(n) / np.sqrt(n) + np.einsum("k,kab->ab", coeffs, basis.elements)
