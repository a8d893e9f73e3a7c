import os
import subprocess
import sys

import numpy as np
import pytest

from semigroup_forge import _backend, _kernels
from semigroup_forge.generators import gks_to_superop

from _helpers import random_gks, random_hermitian


def _starts(rng, r, n):
    z = rng.normal(size=(2, r, n)) + 1j * rng.normal(size=(2, r, n))
    return z[0].copy(), z[1].copy()


def _pair_value(mat, n, phi, psi):
    rho = np.outer(phi, phi.conj())
    out = (mat @ rho.reshape(-1, order="F")).reshape(n, n, order="F")
    return (psi.conj() @ out @ psi).real


@pytest.mark.parametrize("n", [2, 3, 4])
def test_pair_descent_backends_agree(rng, n):
    mat = gks_to_superop(random_gks(rng, n)).mat
    phis, psis = _starts(rng, 16, n)
    vn, pn, qn = _kernels.pair_descent_numba(mat, phis, psis, 500, 1e-15)
    vp, pp, qp = _kernels.pair_descent_numpy(mat, phis, psis, 500, 1e-15)
    assert abs(vn.min() - vp.min()) < 1e-9
    for vals, ps, qs in ((vn, pn, qn), (vp, pp, qp)):
        for v, p, q in zip(vals, ps, qs):
            np.testing.assert_allclose([np.linalg.norm(p), np.linalg.norm(q)], [1, 1], atol=1e-12)
            assert abs(np.vdot(p, q)) < 1e-10
            assert v == pytest.approx(_pair_value(mat, n, p, q), abs=1e-12)


def test_pair_descent_beats_random_sampling(rng):
    n = 3
    mat = gks_to_superop(random_gks(rng, n)).mat
    best = _kernels.pair_descent(mat, *_starts(rng, 16, n))[0].min()
    phis, psis = _starts(rng, 2000, n)
    sampled = []
    for p, q in zip(phis, psis):
        p = p / np.linalg.norm(p)
        q = q - np.vdot(p, q) * p
        sampled.append(_pair_value(mat, n, p, q / np.linalg.norm(q)))
    assert best <= min(sampled) + 1e-12


@pytest.mark.parametrize("backend", ["numba", "numpy"])
def test_product_descent_separable_sum(rng, backend):
    # C = A (x) I + I (x) B has product minimum lambda_min(A) + lambda_min(B)
    n1, n2 = 3, 2
    a, b = random_hermitian(rng, n1), random_hermitian(rng, n2)
    c = np.kron(a, np.eye(n2)) + np.kron(np.eye(n1), b)
    xs = rng.normal(size=(8, n1)) + 1j * rng.normal(size=(8, n1))
    ys = rng.normal(size=(8, n2)) + 1j * rng.normal(size=(8, n2))
    fn = getattr(_kernels, f"product_descent_{backend}")
    vals, x, y = fn(np.ascontiguousarray(c, dtype=complex), n1, n2, xs, ys, 200, 1e-15)
    expected = np.linalg.eigvalsh(a)[0] + np.linalg.eigvalsh(b)[0]
    assert vals.min() == pytest.approx(expected, abs=1e-12)
    k = np.argmin(vals)
    xy = np.kron(x[k], y[k])
    assert (xy.conj() @ c @ xy).real == pytest.approx(vals[k], abs=1e-12)


def test_product_descent_swap_operator(rng):
    # <x y| F |x y> = |<x|y>|^2, minimum 0 although F has eigenvalue -1
    n = 3
    f = np.zeros((n * n, n * n))
    for i in range(n):
        for j in range(n):
            f[i * n + j, j * n + i] = 1
    xs = rng.normal(size=(8, n)) + 1j * rng.normal(size=(8, n))
    ys = rng.normal(size=(8, n)) + 1j * rng.normal(size=(8, n))
    for fn in (_kernels.product_descent_numba, _kernels.product_descent_numpy):
        vals = fn(f.astype(complex), n, n, xs, ys, 200, 1e-15)[0]
        assert abs(vals.min()) < 1e-12


def test_product_descent_backends_agree(rng):
    n = 3
    c = random_hermitian(rng, n * n)
    xs = rng.normal(size=(16, n)) + 1j * rng.normal(size=(16, n))
    ys = rng.normal(size=(16, n)) + 1j * rng.normal(size=(16, n))
    c = np.ascontiguousarray(c, dtype=complex)
    vn = _kernels.product_descent_numba(c, n, n, xs, ys, 200, 1e-15)[0]
    vp = _kernels.product_descent_numpy(c, n, n, xs, ys, 200, 1e-15)[0]
    np.testing.assert_allclose(vn, vp, atol=1e-9)


def test_dispatch_follows_flag(rng, monkeypatch):
    mat = gks_to_superop(random_gks(rng, 2)).mat
    phis, psis = _starts(rng, 4, 2)
    monkeypatch.setattr(_backend, "USE_NUMBA", False)
    vp = _kernels.pair_descent(mat, phis, psis)[0]
    np.testing.assert_array_equal(vp, _kernels.pair_descent_numpy(mat, phis, psis, 500, 1e-15)[0])
    monkeypatch.setattr(_backend, "USE_NUMBA", True)
    vn = _kernels.pair_descent(mat, phis, psis)[0]
    np.testing.assert_array_equal(vn, _kernels.pair_descent_numba(mat, phis, psis, 500, 1e-15)[0])


def _probe(code, **env):
    full = {k: v for k, v in os.environ.items() if not k.startswith("SEMIGROUP_FORGE_")}
    full.update(env)
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=full, check=True)
    return out.stdout.strip()


@pytest.mark.parametrize("value, expected", [(None, "True"), ("0", "True"), ("1", "False"), ("true", "False")])
def test_disable_jit_env(value, expected):
    env = {} if value is None else {_backend.DISABLE_ENV: value}
    assert _probe("from semigroup_forge import _backend; print(_backend.USE_NUMBA)", **env) == expected


def test_thread_cap_env():
    code = (
        "import numba, threadpoolctl\n"
        "from semigroup_forge import _backend\n"
        "print(_backend.apply_thread_cap(), numba.get_num_threads(),"
        " max(i['num_threads'] for i in threadpoolctl.threadpool_info()))"
    )
    assert _probe(code, **{_backend.THREADS_ENV: "1"}) == "1 1 1"
    assert _probe("from semigroup_forge import _backend; print(_backend.apply_thread_cap())",
                  **{_backend.THREADS_ENV: "many"}) == "None"


@pytest.mark.parametrize("backend", ["numba", "numpy"])
def test_pair_descent_ends_at_local_minimum(rng, backend):
    n = 3
    mat = gks_to_superop(random_gks(rng, n)).mat
    fn = getattr(_kernels, f"pair_descent_{backend}")
    vals, ps, qs = fn(mat, *_starts(rng, 8, n), 500, 1e-15)
    k = np.argmin(vals)
    for _ in range(500):
        p = ps[k] + 1e-3 * (rng.normal(size=n) + 1j * rng.normal(size=n))
        p /= np.linalg.norm(p)
        q = qs[k] + 1e-3 * (rng.normal(size=n) + 1j * rng.normal(size=n))
        q -= np.vdot(p, q) * p
        assert _pair_value(mat, n, p, q / np.linalg.norm(q)) >= vals[k] - 1e-12
