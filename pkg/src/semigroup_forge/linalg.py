"""Dense linear-algebra helpers shared by all modules.

Superoperators act on column-stacked matrices: ``vec(X)[a + N*b] = X[a, b]``,
so ``vec(A X B) = kron(B.T, A) @ vec(X)``.
"""
import numpy as np


def vec(x):
    return np.asarray(x).reshape(-1, order="F")


def unvec(v, n=None):
    v = np.asarray(v)
    if n is None:
        n = int(round(np.sqrt(v.shape[0])))
    return v.reshape((n, n), order="F")


def spre(a):
    """Superoperator of ``X -> A X``."""
    a = np.asarray(a)
    return np.kron(np.eye(a.shape[0]), a)


def spost(b):
    """Superoperator of ``X -> X B``."""
    b = np.asarray(b)
    return np.kron(b.T, np.eye(b.shape[0]))


def sprepost(a, b):
    """Superoperator of ``X -> A X B``."""
    return np.kron(np.asarray(b).T, np.asarray(a))


def commutator_superop(h):
    """Superoperator of ``X -> -i [H, X]``."""
    return -1j * (spre(h) - spost(h))


def dag(a):
    return np.conj(np.swapaxes(a, -1, -2))


def herm(a):
    return 0.5 * (a + dag(a))


def hermiticity_defect(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a - dag(a)), initial=0.0))


def stacking_swap(n):
    """Permutation ``S`` with ``vec(X.T) = S vec(X)``."""
    idx = np.arange(n * n).reshape(n, n)
    s = np.zeros((n * n, n * n))
    s[idx.T.reshape(-1), idx.reshape(-1)] = 1.0
    return s


def min_eigh(a):
    """Smallest eigenvalue of the Hermitian part of ``a``."""
    return float(np.linalg.eigvalsh(herm(np.asarray(a)))[0])


def trace_norm(a):
    return float(np.sum(np.linalg.svd(np.asarray(a), compute_uv=False)))


def norm_scale(a):
    """``max(1, ||a||_F)``, the reference scale for relative tolerances."""
    return max(1.0, float(np.linalg.norm(a)))


def partial_trace_first(x, d1, d2):
    """Trace out the first factor of a ``(d1*d2) x (d1*d2)`` operator."""
    return np.einsum("iaib->ab", np.asarray(x).reshape(d1, d2, d1, d2))


def partial_trace_second(x, d1, d2):
    return np.einsum("aibi->ab", np.asarray(x).reshape(d1, d2, d1, d2))
