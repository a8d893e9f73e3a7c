"""Multi-start optimization kernels.

Two problems dominate the runtime of the positivity diagnostics:

* ``pair_descent``: minimize ``Re <psi| L(|phi><phi|) |psi>`` over orthonormal
  pairs ``(phi, psi)``, by projected gradient descent with backtracking.
* ``product_descent``: minimize ``<x (x) y| C |x (x) y>`` over unit product
  vectors, by alternating exact minimization over each factor.

Each has a numba implementation (one start at a time, explicit loops) and a
numpy implementation (all starts at once, batched). ``pair_descent`` and
``product_descent`` dispatch on :data:`_backend.USE_NUMBA`; the ``*_numba``
and ``*_numpy`` entry points are public for tests and benchmarks.
"""
import numpy as np

from . import _backend
from ._backend import njit

_MAX_BACKTRACK = 40


# ---------------------------------------------------------------------------
# orthonormal pair descent, numba


@njit
def _pair_value(mat, n, phi, psi, out_a):
    v = np.empty(n * n, dtype=np.complex128)
    for b in range(n):
        cb = np.conj(phi[b])
        for a in range(n):
            v[a + n * b] = phi[a] * cb
    w = mat @ v
    for b in range(n):
        for a in range(n):
            out_a[a, b] = w[a + n * b]
    val = 0.0
    for a in range(n):
        s = 0.0 + 0.0j
        for b in range(n):
            s += out_a[a, b] * psi[b]
        val += (np.conj(psi[a]) * s).real
    return val


@njit
def _herm_apply(m, n, x):
    out = np.zeros(n, dtype=np.complex128)
    for a in range(n):
        s = 0.0 + 0.0j
        for b in range(n):
            s += 0.5 * (m[a, b] + np.conj(m[b, a])) * x[b]
        out[a] = s
    return out


@njit
def _retract(phi, psi):
    phi = phi / np.sqrt((np.conj(phi) @ phi).real)
    ov = np.conj(phi) @ psi
    psi = psi - ov * phi
    nrm = np.sqrt((np.conj(psi) @ psi).real)
    return phi, psi / nrm, nrm


@njit
def _project(phi, psi, gphi, gpsi):
    """Tangent part of ``(gphi, gpsi)`` on the manifold of orthonormal pairs.

    A plain gradient step followed by Gram-Schmidt is oblique to that manifold
    and can stall away from a minimum, so steps use the projected gradient.
    """
    u = np.conj(psi) @ gphi
    w = np.conj(phi) @ gpsi
    gphi = gphi - (np.conj(phi) @ gphi).real * phi - 0.5 * (u + np.conj(w)) * psi
    gpsi = gpsi - (np.conj(psi) @ gpsi).real * psi - 0.5 * (w + np.conj(u)) * phi
    return gphi, gpsi


@njit
def _pair_descend_one(mat, mat_h, n, phi, psi, eta0, maxiter, ftol):
    amat = np.empty((n, n), dtype=np.complex128)
    qmat = np.empty((n, n), dtype=np.complex128)
    scratch = np.empty((n, n), dtype=np.complex128)
    phi, psi, _ = _retract(phi, psi)
    f = _pair_value(mat, n, phi, psi, amat)
    eta = eta0
    small = 0
    for _ in range(maxiter):
        gpsi = _herm_apply(amat, n, psi)
        _pair_value(mat_h, n, psi, phi, qmat)
        gphi = _herm_apply(qmat, n, phi)
        gphi, gpsi = _project(phi, psi, gphi, gpsi)
        accepted = False
        f2 = f
        phi2 = phi
        psi2 = psi
        for _bt in range(_MAX_BACKTRACK):
            phi2, psi2, nrm = _retract(phi - eta * gphi, psi - eta * gpsi)
            if nrm > 1e-8:
                f2 = _pair_value(mat, n, phi2, psi2, scratch)
                if f2 <= f:
                    accepted = True
                    break
            eta *= 0.5
        if not accepted:
            break
        df = f - f2
        phi = phi2
        psi = psi2
        f = f2
        amat[:, :] = scratch
        eta = min(eta * 1.5, 64.0 * eta0)
        if df <= ftol:
            small += 1
            if small >= 3:
                break
        else:
            small = 0
    return f, phi, psi


@njit
def pair_descent_numba(mat, phis, psis, maxiter, ftol):
    r, n = phis.shape
    mat = np.ascontiguousarray(mat)
    mat_h = np.ascontiguousarray(np.conj(mat).T)
    eta0 = 1.0 / max(np.sqrt(np.sum(np.abs(mat) ** 2)), 1e-300)
    vals = np.empty(r)
    out_phi = np.empty_like(phis)
    out_psi = np.empty_like(psis)
    for k in range(r):
        f, p, q = _pair_descend_one(mat, mat_h, n, phis[k].copy(), psis[k].copy(), eta0, maxiter, ftol)
        vals[k] = f
        out_phi[k] = p
        out_psi[k] = q
    return vals, out_phi, out_psi


# ---------------------------------------------------------------------------
# orthonormal pair descent, numpy (batched over starts)


def _np_retract(phi, psi):
    phi = phi / np.linalg.norm(phi, axis=1, keepdims=True)
    ov = np.einsum("ra,ra->r", phi.conj(), psi)
    psi = psi - ov[:, None] * phi
    nrm = np.linalg.norm(psi, axis=1)
    return phi, psi / np.where(nrm > 0, nrm, 1.0)[:, None], nrm


def _np_apply(mat, n, phi):
    """Batched ``unvec(mat @ vec(|phi><phi|))``."""
    outer = phi[:, :, None] * phi[:, None, :].conj()
    v = outer.transpose(0, 2, 1).reshape(len(phi), n * n)
    w = v @ mat.T
    return w.reshape(len(phi), n, n).transpose(0, 2, 1)


def _np_value(mat, n, phi, psi):
    a = _np_apply(mat, n, phi)
    return np.einsum("ra,rab,rb->r", psi.conj(), a, psi).real, a


def _np_project(phi, psi, gphi, gpsi):
    u = np.einsum("ra,ra->r", psi.conj(), gphi)[:, None]
    w = np.einsum("ra,ra->r", phi.conj(), gpsi)[:, None]
    gphi = gphi - np.einsum("ra,ra->r", phi.conj(), gphi).real[:, None] * phi - 0.5 * (u + w.conj()) * psi
    gpsi = gpsi - np.einsum("ra,ra->r", psi.conj(), gpsi).real[:, None] * psi - 0.5 * (w + u.conj()) * phi
    return gphi, gpsi


def pair_descent_numpy(mat, phis, psis, maxiter, ftol):
    mat = np.asarray(mat, dtype=complex)
    mat_h = mat.conj().T
    r, n = phis.shape
    eta0 = 1.0 / max(np.linalg.norm(mat), 1e-300)
    phi, psi, _ = _np_retract(np.array(phis, dtype=complex), np.array(psis, dtype=complex))
    f, amat = _np_value(mat, n, phi, psi)
    eta = np.full(r, eta0)
    small = np.zeros(r, dtype=int)
    active = np.ones(r, dtype=bool)
    for _ in range(maxiter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        ah = 0.5 * (amat[idx] + amat[idx].conj().transpose(0, 2, 1))
        gpsi = np.einsum("rab,rb->ra", ah, psi[idx])
        q = _np_apply(mat_h, n, psi[idx])
        qh = 0.5 * (q + q.conj().transpose(0, 2, 1))
        gphi = np.einsum("rab,rb->ra", qh, phi[idx])
        gphi, gpsi = _np_project(phi[idx], psi[idx], gphi, gpsi)
        pending = np.ones(len(idx), dtype=bool)
        new_phi = phi[idx].copy()
        new_psi = psi[idx].copy()
        new_f = f[idx].copy()
        new_a = amat[idx].copy()
        e = eta[idx].copy()
        for _bt in range(_MAX_BACKTRACK):
            if not pending.any():
                break
            p = np.flatnonzero(pending)
            cphi, cpsi, nrm = _np_retract(
                phi[idx[p]] - e[p, None] * gphi[p], psi[idx[p]] - e[p, None] * gpsi[p]
            )
            cf, ca = _np_value(mat, n, cphi, cpsi)
            ok = (nrm > 1e-8) & (cf <= f[idx[p]])
            acc = p[ok]
            new_phi[acc], new_psi[acc], new_f[acc], new_a[acc] = cphi[ok], cpsi[ok], cf[ok], ca[ok]
            pending[acc] = False
            e[p[~ok]] *= 0.5
        accepted = ~pending
        df = f[idx] - new_f
        # starts whose line search failed are converged
        active[idx[~accepted]] = False
        a_idx = idx[accepted]
        phi[a_idx], psi[a_idx] = new_phi[accepted], new_psi[accepted]
        f[a_idx], amat[a_idx] = new_f[accepted], new_a[accepted]
        eta[a_idx] = np.minimum(e[accepted] * 1.5, 64.0 * eta0)
        tiny = df[accepted] <= ftol
        small[a_idx] = np.where(tiny, small[a_idx] + 1, 0)
        active[a_idx[small[a_idx] >= 3]] = False
    return f, phi, psi


# ---------------------------------------------------------------------------
# product-vector descent


@njit
def _contract_first(c, n1, n2, x):
    m = np.zeros((n2, n2), dtype=np.complex128)
    for i in range(n1):
        for j in range(n1):
            w = np.conj(x[i]) * x[j]
            for a in range(n2):
                for b in range(n2):
                    m[a, b] += w * c[i * n2 + a, j * n2 + b]
    return 0.5 * (m + np.conj(m.T))


@njit
def _contract_second(c, n1, n2, y):
    m = np.zeros((n1, n1), dtype=np.complex128)
    for a in range(n2):
        for b in range(n2):
            w = np.conj(y[a]) * y[b]
            for i in range(n1):
                for j in range(n1):
                    m[i, j] += w * c[i * n2 + a, j * n2 + b]
    return 0.5 * (m + np.conj(m.T))


@njit
def product_descent_numba(c, n1, n2, xs, ys, maxiter, ftol):
    r = xs.shape[0]
    vals = np.empty(r)
    out_x = np.empty_like(xs)
    out_y = np.empty_like(ys)
    for k in range(r):
        x = xs[k] / np.sqrt((np.conj(xs[k]) @ xs[k]).real)
        y = ys[k] / np.sqrt((np.conj(ys[k]) @ ys[k]).real)
        f = np.inf
        for _ in range(maxiter):
            w, v = np.linalg.eigh(_contract_first(c, n1, n2, x))
            y = np.ascontiguousarray(v[:, 0])
            w, v = np.linalg.eigh(_contract_second(c, n1, n2, y))
            x = np.ascontiguousarray(v[:, 0])
            f_new = w[0]
            if f - f_new <= ftol:
                f = min(f, f_new)
                break
            f = f_new
        vals[k] = f
        out_x[k] = x
        out_y[k] = y
    return vals, out_x, out_y


def product_descent_numpy(c, n1, n2, xs, ys, maxiter, ftol):
    c4 = np.asarray(c, dtype=complex).reshape(n1, n2, n1, n2)
    x = xs / np.linalg.norm(xs, axis=1, keepdims=True)
    y = ys / np.linalg.norm(ys, axis=1, keepdims=True)
    r = len(x)
    f = np.full(r, np.inf)
    active = np.ones(r, dtype=bool)
    for _ in range(maxiter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        mx = np.einsum("ri,iajb,rj->rab", x[idx].conj(), c4, x[idx])
        _, v = np.linalg.eigh(0.5 * (mx + mx.conj().transpose(0, 2, 1)))
        y[idx] = v[:, :, 0]
        my = np.einsum("ra,iajb,rb->rij", y[idx].conj(), c4, y[idx])
        w, v = np.linalg.eigh(0.5 * (my + my.conj().transpose(0, 2, 1)))
        x[idx] = v[:, :, 0]
        f_new = w[:, 0]
        done = f[idx] - f_new <= ftol
        f[idx] = np.minimum(f[idx], f_new)
        active[idx[done]] = False
    return f, x, y


def pair_descent(mat, phis, psis, maxiter=500, ftol=1e-15):
    phis = np.ascontiguousarray(phis, dtype=complex)
    psis = np.ascontiguousarray(psis, dtype=complex)
    mat = np.ascontiguousarray(mat, dtype=complex)
    if _backend.USE_NUMBA:
        return pair_descent_numba(mat, phis, psis, maxiter, ftol)
    return pair_descent_numpy(mat, phis, psis, maxiter, ftol)


def product_descent(c, n1, n2, xs, ys, maxiter=200, ftol=1e-15):
    c = np.ascontiguousarray(c, dtype=complex)
    xs = np.ascontiguousarray(xs, dtype=complex)
    ys = np.ascontiguousarray(ys, dtype=complex)
    if _backend.USE_NUMBA:
        return product_descent_numba(c, n1, n2, xs, ys, maxiter, ftol)
    return product_descent_numpy(c, n1, n2, xs, ys, maxiter, ftol)
