"""Evolution under a generator and the diagnostics that go with it."""
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from . import _kernels
from .cp import DEFAULT_SEED, choi_of_superop
from .errors import InvalidDimensionError, InvariantError, StiffnessError
from .generators import GksGenerator, LindbladGenerator, Superoperator, Verdict, to_superop
from .linalg import dag, herm, norm_scale, trace_norm, unvec, vec

STATE_TOL = 1e-10
DIAGNOSTIC_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix (checked on
    construction to ``1e-10``)."""

    mat: np.ndarray

    def __post_init__(self):
        m = np.array(self.mat, dtype=complex)
        n = m.shape[0]
        if m.ndim != 2 or m.shape != (n, n):
            raise InvalidDimensionError(f"density matrix must be square, got {m.shape}")
        if np.max(np.abs(m - dag(m))) > STATE_TOL:
            raise InvariantError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > STATE_TOL:
            raise InvariantError(f"density matrix trace {np.trace(m).real:.12g} != 1")
        if np.linalg.eigvalsh(herm(m))[0] < -STATE_TOL:
            raise InvariantError("density matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    @property
    def dim(self):
        return self.mat.shape[0]

    @classmethod
    def from_ket(cls, psi):
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, n):
        return cls(np.eye(n) / n)


def _as_matrix(rho):
    return np.asarray(rho.mat if isinstance(rho, DensityMatrix) else rho, dtype=complex)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States (possibly non-positive) on a time grid plus per-step diagnostics."""

    times: np.ndarray
    states: np.ndarray
    trace: np.ndarray = field(init=False)
    lambda_min: np.ndarray = field(init=False)
    purity: np.ndarray = field(init=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=complex)
        if len(times) != len(states):
            raise InvalidDimensionError("times and states differ in length")
        if np.any(np.diff(times) <= 0):
            raise InvariantError("trajectory times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "trace", np.einsum("taa->t", states).real)
        object.__setattr__(self, "lambda_min", np.linalg.eigvalsh(herm(states))[:, 0])
        object.__setattr__(self, "purity", np.einsum("tab,tba->t", states, states).real)

    def __len__(self):
        return len(self.times)

    def max_trace_defect(self):
        return float(np.max(np.abs(self.trace - 1.0)))

    def max_hermiticity_defect(self):
        return float(np.max(np.abs(self.states - dag(self.states))))

    def expectation(self, op):
        return np.einsum("ab,tba->t", np.asarray(op), self.states)


def _check_times(times):
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0):
        raise ValueError("times must be nonnegative")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    return times


def propagator(s, t):
    """``exp(t L)`` as a superoperator (scaling and squaring, Pade)."""
    s = to_superop(s)
    if t == 0:
        return Superoperator.identity(s.dim)
    return Superoperator(expm(t * s.mat))


def evolve_exact(s, rho0, times):
    """``rho_t = exp(t L) rho_0`` for each requested time."""
    s = to_superop(s)
    rho0 = _as_matrix(rho0)
    times = _check_times(times)
    v0 = vec(rho0)
    states = []
    for t in times:
        states.append(rho0.copy() if t == 0 else unvec(expm(t * s.mat) @ v0, s.dim))
    return Trajectory(times, np.array(states))


def _operator_rhs(g):
    """``rho -> L(rho)`` applied in operator form, without the superoperator."""
    h = np.asarray(g.H)
    if isinstance(g, LindbladGenerator):
        left = list(g.jumps)
        right = [dag(v) for v in g.jumps]
    else:
        f = g.basis.elements
        left = list(f)
        # G_k = sum_l c_kl F_l^+
        right = list(np.einsum("kl,lba->kab", g.C, f.conj()))
    n = h.shape[0]
    anti = sum((r @ l for l, r in zip(left, right)), np.zeros((n, n), dtype=complex))
    k_eff = -1j * h - 0.5 * anti

    def rhs(_t, y):
        rho = y.reshape(n, n)
        out = k_eff @ rho + rho @ dag(k_eff)
        for l, r in zip(left, right):
            out = out + l @ rho @ r
        return out.reshape(-1)

    return rhs


def evolve_ode(g, rho0, times, rtol=1e-8, atol=None):
    """Adaptive Dormand-Prince 5(4) integration of ``d rho/dt = L rho``.

    Lindblad and GKS generators are applied in operator form; plain
    superoperators by matrix-vector products. ``atol`` defaults to
    ``rtol / 100``. Raises :class:`StiffnessError` when the step size
    underflows.
    """
    rho0 = _as_matrix(rho0)
    times = _check_times(times)
    n = rho0.shape[0]
    if isinstance(g, (LindbladGenerator, GksGenerator)):
        if g.dim != n:
            raise InvalidDimensionError("state and generator dimensions differ")
        rhs = _operator_rhs(g)
        y0 = rho0.reshape(-1)

        def unpack(y):
            return y.reshape(n, n)

    else:
        s = to_superop(g)
        if s.dim != n:
            raise InvalidDimensionError("state and generator dimensions differ")
        mat = s.mat

        def rhs(_t, y):
            return mat @ y

        y0 = vec(rho0)

        def unpack(y):
            return unvec(y, n)

    atol = rtol * 1e-2 if atol is None else atol
    if times[-1] == 0:
        return Trajectory(times, np.array([rho0.copy()]))
    sol = solve_ivp(
        rhs, (0.0, float(times[-1])), y0.astype(complex), method="RK45",
        t_eval=times, rtol=rtol, atol=atol,
    )
    if sol.status != 0:
        raise StiffnessError(f"integration failed ({sol.message}); try evolve_exact")
    states = [unpack(sol.y[:, k]) for k in range(len(times))]
    if times[0] == 0:
        states[0] = rho0.copy()
    return Trajectory(times, np.array(states))


def semigroup_check(s, t, u):
    """Spectral-norm defect ``||exp((t+u)L) - exp(tL) exp(uL)||``."""
    s = to_superop(s)
    lhs = propagator(s, t + u).mat
    rhs = propagator(s, t).mat @ propagator(s, u).mat
    return float(np.linalg.norm(lhs - rhs, 2))


def _bisect_first(fails, lo, hi, resolution):
    """Shrink ``(lo, hi]`` with ``fails(lo) = False``, ``fails(hi) = True``."""
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if fails(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class CpAlongTrajectory:
    times: np.ndarray
    choi_min_eigenvalues: np.ndarray
    verdicts: np.ndarray
    first_violation: float = None

    @property
    def all_cp(self):
        return bool(np.all(self.verdicts))


def cp_along_trajectory(s, times, tol=1e-9, resolution=1e-4):
    """Choi test of ``exp(t L)`` at each time.

    When a violation is found, the first violation time is refined by bisection
    to ``resolution``, starting from the last passing grid point (or ``t = 0``).
    """
    s = to_superop(s)
    times = _check_times(times)

    def lam(t):
        m = choi_of_superop(propagator(s, t)).mat
        return float(np.linalg.eigvalsh(herm(m))[0]), tol * norm_scale(m)

    lams, ok = [], []
    for t in times:
        val, thr = lam(t)
        lams.append(val)
        ok.append(val >= -thr)
    ok = np.array(ok)
    first = None
    if not ok.all():
        k = int(np.argmin(ok))
        lo = times[k - 1] if k > 0 and ok[k - 1] else 0.0

        def fails(t):
            val, thr = lam(t)
            return val < -thr

        first = _bisect_first(fails, lo, times[k], resolution)
    return CpAlongTrajectory(times, np.array(lams), ok, first)


def positivity_violation_time(s, rho0, times, tol=DIAGNOSTIC_TOL, resolution=1e-4):
    """First time at which ``lambda_min(rho_t) < -tol``, or ``None``.

    Sampled on ``times`` and refined by bisection to ``resolution``.
    """
    s = to_superop(s)
    traj = evolve_exact(s, rho0, times)
    bad = traj.lambda_min < -tol
    if not bad.any():
        return None
    k = int(np.argmax(bad))
    lo = traj.times[k - 1] if k > 0 else 0.0
    v0 = vec(_as_matrix(rho0))

    def fails(t):
        rho = unvec(expm(t * s.mat) @ v0, s.dim)
        return np.linalg.eigvalsh(herm(rho))[0] < -tol

    return _bisect_first(fails, lo, traj.times[k], resolution)


@dataclass(frozen=True)
class PositivityReport:
    """Minimum of ``<psi| L(|phi><phi|) |psi>`` over orthonormal pairs, the
    trace-sum defect ``max_j |sum_i tr(P_i L P_j)|``, and the minimizer."""

    min_value: float
    trace_defect: float
    phi: np.ndarray = field(repr=False)
    psi: np.ndarray = field(repr=False)
    restarts: int
    scale: float = 1.0

    def verdict(self, tol=1e-9):
        return Verdict(self.min_value >= -tol * self.scale, self.min_value)

    def passed(self, tol=1e-9):
        return self.verdict(tol).passed and self.trace_defect <= tol * self.scale


def kossakowski_positivity_check(s, budget=16, seed=DEFAULT_SEED):
    """Finite-dimensional form of the positivity criterion for ``exp(t L)``.

    For every resolution of the identity into orthogonal projectors the
    off-diagonal terms ``tr(P_i L(P_j))`` must be nonnegative. Every such term
    is a sum of rank-one terms ``<psi| L(|phi><phi|) |psi>`` with
    ``<psi|phi> = 0``, so the minimum over orthonormal pairs decides it. The
    pair minimum is found by multi-start projected gradient descent; the
    computational basis pairs are always among the starts.
    """
    s = to_superop(s)
    n = s.dim
    rng = np.random.default_rng(seed)
    eye = np.eye(n, dtype=complex)
    fixed = [(eye[i], eye[j]) for i in range(n) for j in range(n) if i != j]
    phis = [p for p, _ in fixed]
    psis = [q for _, q in fixed]
    z = rng.normal(size=(budget, 2, n)) + 1j * rng.normal(size=(budget, 2, n))
    phis = np.array(phis + list(z[:, 0]))
    psis = np.array(psis + list(z[:, 1]))
    scale = norm_scale(s.mat)
    vals, bphi, bpsi = _kernels.pair_descent(s.mat, phis, psis, 500, 1e-15 * scale)
    k = int(np.argmin(vals))
    return PositivityReport(
        float(vals[k]), s.generator_trace_defect(), bphi[k], bpsi[k], len(phis), scale
    )


def steady_states(s, tol=1e-10):
    """Basis of ``ker L`` from the SVD (threshold ``tol * sigma_max``),
    each normalized to unit trace when its trace is nonzero."""
    s = to_superop(s)
    _, sv, vh = np.linalg.svd(s.mat)
    null = vh[sv <= tol * sv[0]].conj() if sv[0] > 0 else vh.conj()
    out = []
    for v in null:
        rho = unvec(v, s.dim)
        tr = np.trace(rho)
        if abs(tr) > 1e-12:
            rho = rho / tr
        out.append(rho)
    return out


def spectral_analysis(s):
    """Eigenvalues of the generator, sorted by real part then imaginary part."""
    ev = np.linalg.eigvals(to_superop(s).mat)
    return ev[np.lexsort((ev.imag, ev.real))]


def spectral_abscissa(s):
    return float(np.max(spectral_analysis(s).real))


def trace_distance(a, b):
    return 0.5 * trace_norm(np.asarray(a) - np.asarray(b))
