"""Historical master equations as concrete generators.

Each constructor returns one of the generator types of :mod:`.generators`, so
the diagnostics in :mod:`.semigroup` and :mod:`.cp` apply unchanged. Only some
of these generators are GKLS; which ones fail, and how, is the point.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import quad

from .bath import BathSpec
from .basis import gell_mann_basis
from .errors import (
    AccuracyError,
    InvalidDimensionError,
    MissingSpectralDataError,
    NonPhysicalInputError,
)
from .generators import (
    LindbladGenerator,
    Superoperator,
    Verdict,
    GksGenerator,
    gks_to_lindblad,
    weighted_dissipator_superop,
    weighted_to_gks,
)
from .linalg import commutator_superop, dag, herm, norm_scale, spost, spre, sprepost

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def _hermitian(h, name="H"):
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise InvalidDimensionError(f"{name} must be square, got {h.shape}")
    if np.max(np.abs(h - dag(h))) > 1e-12 * norm_scale(h):
        raise NonPhysicalInputError(f"{name} is not Hermitian")
    return herm(h)


def _nonnegative(**rates):
    for name, r in rates.items():
        if not np.isfinite(r) or r < 0:
            raise NonPhysicalInputError(f"{name} must be a nonnegative rate, got {r}")


# ---------------------------------------------------------------------------
# truncated oscillator


@dataclass(frozen=True)
class FockSpec:
    """Fock space truncated to the ``D`` lowest number states."""

    D: int

    def __post_init__(self):
        if int(self.D) != self.D or self.D < 2:
            raise InvalidDimensionError(f"truncation must be an integer >= 2, got {self.D}")

    @cached_property
    def a(self):
        """Annihilation operator, ``a|n> = sqrt(n)|n-1>``."""
        return np.diag(np.sqrt(np.arange(1, self.D)), k=1).astype(complex)

    @cached_property
    def number(self):
        return np.diag(np.arange(self.D)).astype(complex)

    def leakage(self, rho, levels=2):
        """Population of the top ``levels`` number states."""
        rho = np.asarray(rho)
        return float(np.real(np.trace(rho[-levels:, -levels:])))


def _fock(f):
    return f if isinstance(f, FockSpec) else FockSpec(int(f))


def landau_generator(f, gamma):
    """Damped oscillator ``1/2 gamma (2 a rho a^+ - rho a^+ a - a^+ a rho)``.

    No Hamiltonian term; adding ``Omega a^+ a`` only rotates the phases.
    """
    f = _fock(f)
    if not gamma > 0:
        raise NonPhysicalInputError(f"gamma must be positive, got {gamma}")
    return LindbladGenerator(np.zeros((f.D, f.D), dtype=complex), (np.sqrt(gamma) * f.a,))


def thermal_photon_number(omega, temperature):
    """Bose occupation ``1 / (exp(omega / T) - 1)``."""
    return 1.0 / np.expm1(omega / temperature)


def gibbs_state(H, temperature):
    H = _hermitian(H)
    e, u = np.linalg.eigh(H)
    p = np.exp(-(e - e[0]) / temperature)
    p /= p.sum()
    return (u * p) @ dag(u)


def laser_generator(f, nu, delta=None, omega=None, temperature=None):
    """Single-mode field coupled to a pumped medium.

    Jumps ``sqrt(2 nu) b`` (loss) and ``sqrt(2 delta) b^+`` (gain). Give either
    ``delta`` directly or ``omega`` and ``temperature``, in which case
    ``delta = nu exp(-omega / T)``. With ``omega`` the Hamiltonian is
    ``omega b^+ b``, otherwise zero.
    """
    f = _fock(f)
    if delta is None:
        if omega is None or temperature is None:
            raise ValueError("give delta, or both omega and temperature")
        if temperature <= 0:
            raise NonPhysicalInputError(f"temperature must be positive, got {temperature}")
        delta = nu * np.exp(-omega / temperature)
    _nonnegative(nu=nu, delta=delta)
    if not nu > delta:
        raise NonPhysicalInputError(f"need nu > delta for a stationary state (nu={nu}, delta={delta})")
    b = f.a
    h = omega * f.number if omega is not None else np.zeros((f.D, f.D), dtype=complex)
    jumps = [np.sqrt(2 * nu) * b]
    if delta > 0:
        jumps.append(np.sqrt(2 * delta) * dag(b))
    return LindbladGenerator(h, tuple(jumps))


# ---------------------------------------------------------------------------
# trace-losing equations


def optical_potential_generator(H, V, tol=1e-12):
    """``rho' = -i[H, rho] - (V rho + rho V)`` for ``V >= 0``: an absorbing
    potential with no jump term, so the trace decays."""
    H = _hermitian(H)
    V = _hermitian(V, "V")
    if H.shape != V.shape:
        raise InvalidDimensionError(f"H {H.shape} and V {V.shape} differ in shape")
    lam = np.linalg.eigvalsh(V)[0]
    if lam < -tol * norm_scale(V):
        raise NonPhysicalInputError(
            f"V has eigenvalue {lam:.3g} < 0; the trace could grow above 1"
        )
    return Superoperator(commutator_superop(H) - spre(V) - spost(V))


def _lamb_gamma(gamma1, gamma2):
    _nonnegative(gamma1=gamma1, gamma2=gamma2)
    return np.diag([gamma1, gamma2]).astype(complex)


def lamb_generator(H, gamma1, gamma2):
    """Two-level decay ``rho' = -i[H, rho] - 1/2 (G rho + rho G)``,
    ``G = diag(gamma1, gamma2)``. Zero rates are allowed."""
    H = _hermitian(H)
    if H.shape != (2, 2):
        raise InvalidDimensionError(f"H must be 2x2, got {H.shape}")
    g = _lamb_gamma(gamma1, gamma2)
    return Superoperator(commutator_superop(H) - 0.5 * spre(g) - 0.5 * spost(g))


def lamb_propagate(H, gamma1, gamma2, rho0, t):
    """Closed form ``e^{(-iH - G/2)t} rho0 e^{(iH - G/2)t}``."""
    from scipy.linalg import expm

    H = _hermitian(H)
    k = expm((-1j * H - 0.5 * _lamb_gamma(gamma1, gamma2)) * t)
    return k @ np.asarray(rho0, dtype=complex) @ dag(k)


def cure_lamb(H, gamma1, gamma2, kraus=None, tol=1e-9):
    """Add a feeding term ``Phi(rho) = sum K rho K^+`` with ``sum K^+ K = G``
    to :func:`lamb_generator`, which makes it trace preserving and GKLS.

    The default ``K1 = sqrt(gamma1)|1><0|``, ``K2 = sqrt(gamma2)|0><1|``
    moves population lost from one level into the other.
    """
    H = _hermitian(H)
    g = _lamb_gamma(gamma1, gamma2)
    if kraus is None:
        k1 = np.sqrt(gamma1) * np.array([[0, 0], [1, 0]], dtype=complex)
        k2 = np.sqrt(gamma2) * np.array([[0, 1], [0, 0]], dtype=complex)
        kraus = [k for k in (k1, k2) if np.any(k)]
    kraus = [np.asarray(k, dtype=complex) for k in kraus]
    total = sum((dag(k) @ k for k in kraus), np.zeros((2, 2), dtype=complex))
    err = np.max(np.abs(total - g))
    if err > tol:
        raise NonPhysicalInputError(f"sum K^+ K differs from diag(gamma1, gamma2) by {err:.3g}")
    return LindbladGenerator(H, tuple(kraus))


# ---------------------------------------------------------------------------
# Bohr-frequency bookkeeping


def _cluster(values, tol):
    """Group sorted-ish reals into clusters whose consecutive gaps are <= tol.
    Returns (cluster means, label per value)."""
    order = np.argsort(values, kind="stable")
    labels = np.empty(len(values), dtype=int)
    means = []
    members = [order[0]]
    for prev, cur in zip(order[:-1], order[1:]):
        if values[cur] - values[prev] > tol:
            means.append(float(np.mean(values[members])))
            labels[members] = len(means) - 1
            members = []
        members.append(cur)
    means.append(float(np.mean(values[members])))
    labels[members] = len(means) - 1
    return np.array(means), labels


def _couplings(couplings, n):
    ops = np.asarray([np.asarray(v, dtype=complex) for v in couplings])
    if ops.ndim != 3 or ops.shape[1:] != (n, n):
        raise InvalidDimensionError(f"coupling operators must be {n}x{n}")
    return ops


# ---------------------------------------------------------------------------
# Redfield


def _half_fourier(bath, a, b, omega, tau_max, quad_tol):
    """``int_0^tau_max h_ab(tau) e^{-i omega tau} dtau`` by adaptive quadrature."""
    hr, hi = bath.scalar(a, b)
    opts = dict(epsabs=quad_tol, epsrel=quad_tol, limit=2000)
    if omega == 0.0:
        return quad(hr, 0.0, tau_max, **opts)[0] + 1j * quad(hi, 0.0, tau_max, **opts)[0]
    c = dict(opts, weight="cos", wvar=omega)
    s = dict(opts, weight="sin", wvar=omega)
    rc, rs = quad(hr, 0.0, tau_max, **c)[0], quad(hr, 0.0, tau_max, **s)[0]
    ic, is_ = quad(hi, 0.0, tau_max, **c)[0], quad(hi, 0.0, tau_max, **s)[0]
    # (hr + i hi)(cos - i sin)
    return (rc + is_) + 1j * (ic - rs)


def redfield_operators(H, couplings, bath, tau_max=None, quad_tol=1e-10, tail_tol=1e-6):
    """The operators ``X_a = sum_b int_0^tau_max h_ab(tau) V_b(-tau) dtau`` with
    ``V(-tau) = e^{-iH tau} V e^{iH tau}``.

    The tail ``max |h(tau)|`` over the last tenth of ``[0, tau_max]`` must be
    below ``tail_tol`` times ``max |h|``; otherwise :class:`AccuracyError`.
    """
    H = _hermitian(H)
    n = H.shape[0]
    ops = _couplings(couplings, n)
    if not isinstance(bath, BathSpec) or bath.kind != "correlation":
        raise ValueError("Redfield needs a correlation-function table")
    m = len(ops)
    if bath.n_couplings != m:
        raise InvalidDimensionError(f"bath has {bath.n_couplings} couplings, got {m} operators")
    grid = bath.grid
    if tau_max is None:
        tau_max = float(grid[-1])
    if tau_max > grid[-1] + 1e-12 or grid[0] > 1e-12:
        raise MissingSpectralDataError(
            f"correlation table covers [{grid[0]:.6g}, {grid[-1]:.6g}], need [0, {tau_max:.6g}]"
        )
    mag = np.abs(bath.values).max(axis=(1, 2))
    peak = mag.max()
    tail = mag[(grid >= 0.9 * tau_max) & (grid <= tau_max)]
    if peak > 0 and tail.size and tail.max() > tail_tol * peak:
        raise AccuracyError(
            f"correlation tail {tail.max():.3g} exceeds {tail_tol:g} x peak {peak:.3g} "
            f"near tau_max={tau_max:.6g}; increase tau_max or check decay"
        )
    e, u = np.linalg.eigh(H)
    vp = np.einsum("ji,ajk,kl->ail", u.conj(), ops, u)
    bohr = e[:, None] - e[None, :]
    freqs, labels = _cluster(bohr.reshape(-1), 1e-9 * norm_scale(H))
    labels = labels.reshape(n, n)
    gam = np.zeros((len(freqs), m, m), dtype=complex)
    for w, om in enumerate(freqs):
        for a in range(m):
            for b in range(m):
                if np.any(bath.values[:, a, b]):
                    gam[w, a, b] = _half_fourier(bath, a, b, om, tau_max, quad_tol)
    xp = np.einsum("bij,ijab->aij", vp, gam[labels])
    return np.einsum("ij,ajk,lk->ail", u, xp, u.conj())


def redfield_generator(H, couplings, bath, tau_max=None, quad_tol=1e-10, tail_tol=1e-6):
    """``rho' = -i[H, rho] - sum_a [V_a, X_a rho - rho X_a^+]``.

    Trace and Hermiticity preserving by construction, but not in general
    positivity preserving. See :func:`redfield_operators` for ``X_a``.
    """
    H = _hermitian(H)
    ops = _couplings(couplings, H.shape[0])
    xs = redfield_operators(H, ops, bath, tau_max, quad_tol, tail_tol)
    mat = commutator_superop(H)
    for v, x in zip(ops, xs):
        mat = mat - spre(v @ x) + sprepost(x, v) + sprepost(v, dag(x)) - spost(dag(x) @ v)
    return Superoperator(mat)


# ---------------------------------------------------------------------------
# Davies


@dataclass(frozen=True, eq=False)
class DaviesGenerator:
    """Weak-coupling generator in secular form.

    ``freqs[w]`` are the Bohr frequencies, ``jumps[w, a]`` the components
    ``V_a(omega)`` and ``rates[w]`` the ``M x M`` block ``h^(omega)``; the
    dissipator is
    ``sum_w sum_ab rates[w,a,b] (V_a rho V_b^+ - 1/2 {V_b^+ V_a, rho})``.
    """

    H: np.ndarray
    freqs: np.ndarray
    jumps: np.ndarray
    rates: np.ndarray
    lamb_shift: np.ndarray

    @property
    def dim(self):
        return self.H.shape[0]

    def _flat(self):
        nw, m = self.rates.shape[:2]
        ops = self.jumps.reshape(nw * m, self.dim, self.dim)
        w = np.zeros((nw * m, nw * m), dtype=complex)
        for k in range(nw):
            w[k * m:(k + 1) * m, k * m:(k + 1) * m] = self.rates[k]
        return ops, w

    @cached_property
    def superop(self):
        ops, w = self._flat()
        return Superoperator(
            commutator_superop(self.H + self.lamb_shift) + weighted_dissipator_superop(ops, w)
        )

    def is_gkls(self, tol=1e-9):
        """PSD check of each rate block (sufficient for GKLS)."""
        lam = min(float(np.linalg.eigvalsh(herm(r))[0]) for r in self.rates)
        return Verdict(lam >= -tol, lam)

    def to_gks(self, basis=None):
        ops, w = self._flat()
        return weighted_to_gks(self.H + self.lamb_shift, list(ops), w, basis)

    def to_lindblad(self, tol=1e-9):
        return gks_to_lindblad(self.to_gks(), tol=tol)


def _bohr_components(H, ops, gap_tol):
    e, u = np.linalg.eigh(H)
    tol = gap_tol * norm_scale(H)
    levels, lab = _cluster(e, tol)
    proj = np.array([(u[:, lab == k]) @ dag(u[:, lab == k]) for k in range(len(levels))])
    diffs = levels[None, :] - levels[:, None]  # eps' - eps, indexed [eps, eps']
    freqs, flab = _cluster(diffs.reshape(-1), tol)
    flab = flab.reshape(len(levels), len(levels))
    n = H.shape[0]
    jumps = np.zeros((len(freqs), len(ops), n, n), dtype=complex)
    for i in range(len(levels)):
        for j in range(len(levels)):
            jumps[flab[i, j]] += np.einsum("ab,kbc,cd->kad", proj[i], ops, proj[j])
    keep = np.array([np.any(np.abs(j) > 1e-14) for j in jumps])
    return freqs[keep], jumps[keep]


def _spline_principal_value(spline, omega):
    """Exact ``P int p(x)/(x - omega) dx`` of a piecewise cubic over its
    breakpoints, for every output column of the spline.

    Each piece is re-expanded in ``u = x - omega``,
    ``p = a0 + a1 u + a2 u^2 + a3 u^3``, and integrated in closed form. At a
    breakpoint equal to ``omega`` the two ``a0 log|u|`` terms cancel by
    continuity and are dropped.
    """
    x = spline.x
    c0, c1, c2, c3 = spline.c  # p_k(t) = c0 t^3 + c1 t^2 + c2 t + c3, t = x - x_k
    t0 = (omega - x[:-1])[:, None]
    a0 = ((c0 * t0 + c1) * t0 + c2) * t0 + c3
    a1 = (3 * c0 * t0 + 2 * c1) * t0 + c2
    a2 = 3 * c0 * t0 + c1
    a3 = c0
    ua = (x[:-1] - omega)[:, None]
    ub = (x[1:] - omega)[:, None]
    with np.errstate(divide="ignore"):
        la = np.where(ua == 0, 0.0, np.log(np.abs(ua)))
        lb = np.where(ub == 0, 0.0, np.log(np.abs(ub)))
    total = a0 * (lb - la) + a1 * (ub - ua) + a2 * (ub**2 - ua**2) / 2 + a3 * (ub**3 - ua**3) / 3
    return total.sum(axis=0)


def principal_value_shift(spectral, a, b, omega):
    """``s_ab(omega) = 1/(2 pi) P int h^_ab(xi) / (xi - omega) dxi`` over the
    range of the table, integrating the cubic-spline interpolant exactly."""
    lo, hi = spectral.grid[0], spectral.grid[-1]
    if not lo < omega < hi:
        raise MissingSpectralDataError(
            f"principal value at {omega:.6g} needs spectral data on both sides"
        )
    re, im = spectral.splines
    col = a * spectral.n_couplings + b
    return (_spline_principal_value(re, omega)[col] + 1j * _spline_principal_value(im, omega)[col]) / (
        2 * np.pi
    )


def davies_generator(H, couplings, spectral, lamb_shift="pv", gap_tol=1e-9):
    """Davies generator from a spectral table ``h^_ab(omega)``.

    ``lamb_shift`` is ``"pv"`` (principal-value integral of the table),
    ``"zero"``, or a :class:`BathSpec` of kind ``lamb_shift`` supplying
    ``s_ab(omega)`` directly. Energies closer than ``gap_tol * max(1, ||H||)``
    count as degenerate, and so do Bohr frequencies.
    """
    H = _hermitian(H)
    ops = _couplings(couplings, H.shape[0])
    if not isinstance(spectral, BathSpec) or spectral.kind != "spectral":
        raise ValueError("Davies needs a spectral-density table")
    m = len(ops)
    if spectral.n_couplings != m:
        raise InvalidDimensionError(f"bath has {spectral.n_couplings} couplings, got {m} operators")
    freqs, jumps = _bohr_components(H, ops, gap_tol)
    rates = np.array([herm(spectral(w, strict=True)) for w in freqs]).reshape(len(freqs), m, m)
    n = H.shape[0]
    shift = np.zeros((n, n), dtype=complex)
    if isinstance(lamb_shift, BathSpec):
        if lamb_shift.kind != "lamb_shift" or lamb_shift.n_couplings != m:
            raise ValueError("lamb_shift table must be of kind 'lamb_shift' with matching couplings")
        s = [lamb_shift(w, strict=True) for w in freqs]
    elif lamb_shift == "pv":
        s = [
            np.array([[principal_value_shift(spectral, a, b, w) for b in range(m)] for a in range(m)])
            for w in freqs
        ]
    elif lamb_shift == "zero":
        s = None
    else:
        raise ValueError(f"lamb_shift must be 'pv', 'zero' or a BathSpec, got {lamb_shift!r}")
    if s is not None:
        for k in range(len(freqs)):
            shift += np.einsum("ab,bji,ajk->ik", s[k], jumps[k].conj(), jumps[k])
        shift = herm(shift)
    return DaviesGenerator(H, freqs, jumps, rates, shift)


# ---------------------------------------------------------------------------
# qubit family with a positivity-only criterion


def belavin_generator(ops, rates, H=None):
    """``-i[H, .] + 1/2 sum_ij g_ij (2 A_i rho A_j^+ - {A_j^+ A_i, rho})``
    for a Hermitian rate matrix ``g``."""
    ops = np.asarray(ops, dtype=complex)
    g = np.asarray(rates, dtype=complex).reshape(len(ops), len(ops))
    if np.max(np.abs(g - dag(g)), initial=0.0) > 1e-12 * norm_scale(g):
        raise NonPhysicalInputError("rate matrix must be Hermitian")
    n = ops.shape[1]
    h = np.zeros((n, n), dtype=complex) if H is None else _hermitian(H)
    return Superoperator(commutator_superop(h) + weighted_dissipator_superop(ops, g))


def belavin_to_gks(ops, rates, H=None, basis=None):
    ops = np.asarray(ops, dtype=complex)
    n = ops.shape[1]
    h = np.zeros((n, n), dtype=complex) if H is None else _hermitian(H)
    return weighted_to_gks(h, list(ops), np.asarray(rates, dtype=complex), basis)


def belavin_is_gkls(rates, tol=1e-9):
    """Eigenvalue test on the rate matrix. Exact when the ``A_i`` are traceless
    and linearly independent; otherwise use ``is_gkls(belavin_to_gks(...))``."""
    lam = float(np.linalg.eigvalsh(herm(np.atleast_2d(np.asarray(rates, dtype=complex))))[0])
    return Verdict(lam >= -tol, lam)


def pauli_example_generator(gamma1, gamma2, gamma3):
    """``L rho = sum_k gamma_k (s_k rho s_k - rho)`` with Pauli matrices ``s_k``.

    In the normalized basis ``s_k / sqrt(2)`` the Kossakowski matrix is
    ``diag(2 gamma_k)``.
    """
    c = np.diag([2.0 * gamma1, 2.0 * gamma2, 2.0 * gamma3]).astype(complex)
    return GksGenerator(np.zeros((2, 2), dtype=complex), c, gell_mann_basis(2))


# ---------------------------------------------------------------------------
# registry used by spec files and the command line

BUILTIN_REDFIELD_BATH = "builtin:redfield_ohmic"


def load_builtin_bath(name):
    from importlib.resources import files

    from .bath import parse_bath

    if not name.startswith("builtin:"):
        raise ValueError(f"not a builtin bath name: {name!r}")
    res = files("semigroup_forge") / "data" / (name.split(":", 1)[1] + "_bath.txt")
    if not res.is_file():
        raise FileNotFoundError(f"no builtin bath {name!r}")
    return parse_bath(res.read_text(encoding="utf-8"))


def _resolve_bath(ref, base_dir=None):
    from pathlib import Path

    from .bath import read_bath

    if isinstance(ref, BathSpec):
        return ref
    if ref.startswith("builtin:"):
        return load_builtin_bath(ref)
    path = Path(ref)
    if base_dir is not None and not path.is_absolute():
        path = Path(base_dir) / path
    return read_bath(path)


def _qubit_h(omega0):
    return 0.5 * omega0 * PAULI[2]


def _build_redfield(p, base_dir=None):
    bath = _resolve_bath(p["bath"], base_dir)
    return redfield_generator(_qubit_h(p["omega0"]), [PAULI[0]], bath, p["tau_max"])


def _build_davies(p, base_dir=None):
    from .bath import ohmic_spectral_table

    w0 = p["omega0"]
    if p.get("bath"):
        spec = _resolve_bath(p["bath"], base_dir)
    else:
        spec = ohmic_spectral_table(
            p["eta"], p["cutoff"], p["temperature"], p["omega_max"], p["points"], include=(w0, -w0)
        )
    return davies_generator(_qubit_h(w0), [PAULI[0]], spec, lamb_shift=p["lamb_shift"]).superop


_QUBIT_H = [[1.0, 0.5], [0.5, -1.0]]


@dataclass(frozen=True)
class ZooEntry:
    name: str
    description: str
    defaults: dict
    build: object
    matrix_params: tuple = ()
    matrix_list_params: tuple = ()


ZOO = {
    e.name: e
    for e in (
        ZooEntry(
            "landau", "damped oscillator, single jump sqrt(gamma) a",
            {"D": 6, "gamma": 1.0},
            lambda p, d=None: landau_generator(p["D"], p["gamma"]),
        ),
        ZooEntry(
            "optical_potential", "absorbing potential -(V rho + rho V), loses trace",
            {"H": _QUBIT_H, "V": [[0.2, 0.0], [0.0, 0.5]]},
            lambda p, d=None: optical_potential_generator(p["H"], p["V"]),
            matrix_params=("H", "V"),
        ),
        ZooEntry(
            "lamb", "two-level decay -1/2 (G rho + rho G), loses trace",
            {"H": _QUBIT_H, "gamma1": 1.0, "gamma2": 0.5},
            lambda p, d=None: lamb_generator(p["H"], p["gamma1"], p["gamma2"]),
            matrix_params=("H",),
        ),
        ZooEntry(
            "cured_lamb", "two-level decay with feeding jumps, trace preserving and GKLS",
            {"H": _QUBIT_H, "gamma1": 1.0, "gamma2": 0.5},
            lambda p, d=None: cure_lamb(p["H"], p["gamma1"], p["gamma2"]),
            matrix_params=("H",),
        ),
        ZooEntry(
            "laser", "single-mode field with loss nu and gain delta",
            {"D": 16, "nu": 1.0, "delta": 0.2, "omega": None, "temperature": None},
            lambda p, d=None: laser_generator(p["D"], p["nu"], p["delta"], p["omega"], p["temperature"]),
        ),
        ZooEntry(
            "redfield", "qubit omega0 sz/2 coupled through sx to a tabulated bath; not positive",
            {"omega0": 1.0, "bath": BUILTIN_REDFIELD_BATH, "tau_max": None},
            _build_redfield,
        ),
        ZooEntry(
            "davies", "qubit omega0 sz/2 coupled through sx, Ohmic thermal spectral density",
            {
                "omega0": 1.0, "eta": 0.1, "cutoff": 3.0, "temperature": 0.5,
                "omega_max": 8.0, "points": 801, "lamb_shift": "pv", "bath": None,
            },
            _build_davies,
        ),
        ZooEntry(
            "belavin", "qubit rate-matrix family sum g_ij (A_i rho A_j^+ - ...)",
            {
                "ops": [p.tolist() for p in PAULI],
                "rates": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]],
                "H": None,
            },
            lambda p, d=None: belavin_generator(p["ops"], p["rates"], p["H"]),
            matrix_params=("rates", "H"),
            matrix_list_params=("ops",),
        ),
        ZooEntry(
            "pauli", "qubit family sum gamma_k (s_k rho s_k - rho)",
            {"gamma": [1.0, 1.0, 1.0]},
            lambda p, d=None: pauli_example_generator(*p["gamma"]),
        ),
    )
}


def build_zoo(name, params=None, base_dir=None):
    """Generator of a registry entry with ``params`` overriding the defaults.
    Matrix parameters must already be arrays (or nested real lists)."""
    if name not in ZOO:
        raise KeyError(f"unknown zoo entry {name!r}; known: {', '.join(sorted(ZOO))}")
    entry = ZOO[name]
    p = dict(entry.defaults)
    unknown = set(params or {}) - set(p)
    if unknown:
        raise KeyError(f"unknown parameter(s) for {name}: {', '.join(sorted(unknown))}")
    p.update(params or {})
    for key in entry.matrix_params:
        if p[key] is not None:
            p[key] = np.asarray(p[key], dtype=complex)
    for key in entry.matrix_list_params:
        p[key] = np.asarray(p[key], dtype=complex)
    return entry.build(p, base_dir)
