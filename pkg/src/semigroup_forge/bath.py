"""Tabulated bath data: correlation functions ``h_ab(tau)``, spectral densities
``h^_ab(omega)`` and Lamb-shift tables ``s_ab(omega)``.

Text format (whitespace separated, ``#`` comments)::

    # format_version: 1
    # kind: correlation            (or: spectral, lamb_shift)
    # couplings: M
    x  Re h_00  Im h_00  Re h_01  Im h_01 ... Re h_(M-1)(M-1)  Im h_(M-1)(M-1)

Entries are row-major in ``(a, b)``. Between grid points values are
interpolated by a not-a-knot cubic spline (real and imaginary parts
separately); outside the grid they are clamped to the end values, unless the
caller asks for strict lookup.
"""
import io
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import InvalidDimensionError, MissingSpectralDataError

FORMAT_VERSION = 1
KINDS = ("correlation", "spectral", "lamb_shift")


class BathFormatError(ValueError):
    def __init__(self, message, line=None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


@dataclass(frozen=True, eq=False)
class BathSpec:
    kind: str
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown bath table kind {self.kind!r}")
        grid = np.array(self.grid, dtype=float)
        values = np.array(self.values, dtype=complex)
        if values.ndim == 1:
            values = values[:, None, None]
        if values.ndim != 3 or values.shape[0] != grid.shape[0] or values.shape[1] != values.shape[2]:
            raise InvalidDimensionError(f"values shape {values.shape} incompatible with grid {grid.shape}")
        if grid.size < 4 or np.any(np.diff(grid) <= 0):
            raise ValueError("grid needs at least 4 strictly increasing points")
        grid.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @property
    def n_couplings(self):
        return self.values.shape[1]

    @cached_property
    def splines(self):
        """``(CubicSpline of real parts, CubicSpline of imaginary parts)``, one
        output column per flattened ``(a, b)`` entry."""
        flat = self.values.reshape(len(self.grid), -1)
        return CubicSpline(self.grid, flat.real), CubicSpline(self.grid, flat.imag)

    def __call__(self, x, strict=False):
        """Interpolated table value(s), shape ``x.shape + (M, M)``."""
        x = np.asarray(x, dtype=float)
        lo, hi = self.grid[0], self.grid[-1]
        if strict and np.any((x < lo - 1e-12) | (x > hi + 1e-12)):
            bad = x[(x < lo) | (x > hi)].reshape(-1)[0]
            raise MissingSpectralDataError(
                f"no {self.kind} data at {bad:.6g}; table covers [{lo:.6g}, {hi:.6g}]"
            )
        xc = np.clip(x, lo, hi)
        re, im = self.splines
        m = self.n_couplings
        return (re(xc) + 1j * im(xc)).reshape(x.shape + (m, m))

    def scalar(self, a=0, b=0):
        """Real-valued callables for the real and imaginary part of one entry."""
        re, im = self.splines
        col = a * self.n_couplings + b
        lo, hi = self.grid[0], self.grid[-1]
        return (
            lambda x: float(re(min(max(x, lo), hi))[col]),
            lambda x: float(im(min(max(x, lo), hi))[col]),
        )

    def min_eigenvalue(self):
        """Smallest eigenvalue of the Hermitian part over all grid points
        (nonnegative for a spectral density, by Bochner's theorem)."""
        v = self.values
        return float(np.linalg.eigvalsh(0.5 * (v + np.conj(np.swapaxes(v, 1, 2))))[:, 0].min())


def write_bath(spec, stream=None):
    """Serialize to the text format; returns the string when ``stream`` is None."""
    out = stream if stream is not None else io.StringIO()
    m = spec.n_couplings
    out.write(f"# format_version: {FORMAT_VERSION}\n")
    out.write(f"# kind: {spec.kind}\n")
    out.write(f"# couplings: {m}\n")
    x = "tau" if spec.kind == "correlation" else "omega"
    cols = [x] + [f"{p}_{a}{b}" for a in range(m) for b in range(m) for p in ("re", "im")]
    out.write("# columns: " + " ".join(cols) + "\n")
    flat = spec.values.reshape(len(spec.grid), -1)
    for g, row in zip(spec.grid, flat):
        nums = [repr(float(g))]
        for z in row:
            nums.append(repr(float(z.real)))
            nums.append(repr(float(z.imag)))
        out.write(" ".join(nums) + "\n")
    if stream is None:
        return out.getvalue()
    return None


def parse_bath(text):
    header = {}
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" in body:
                key, val = body.split(":", 1)
                header[key.strip()] = val.strip()
            continue
        try:
            rows.append((lineno, [float(tok) for tok in line.split()]))
        except ValueError as exc:
            raise BathFormatError(f"not a number ({exc})", lineno) from None
    if header.get("format_version", str(FORMAT_VERSION)) != str(FORMAT_VERSION):
        raise BathFormatError(f"unsupported format_version {header['format_version']}")
    kind = header.get("kind")
    if kind not in KINDS:
        raise BathFormatError(f"missing or unknown '# kind:' header ({kind!r})")
    try:
        m = int(header.get("couplings", "1"))
    except ValueError:
        raise BathFormatError("'# couplings:' must be an integer") from None
    width = 1 + 2 * m * m
    for lineno, r in rows:
        if len(r) != width:
            raise BathFormatError(f"expected {width} columns, found {len(r)}", lineno)
    if not rows:
        raise BathFormatError("no data rows")
    data = np.array([r for _, r in rows])
    vals = data[:, 1::2] + 1j * data[:, 2::2]
    return BathSpec(kind, data[:, 0], vals.reshape(len(data), m, m))


def read_bath(path):
    with open(path, encoding="utf-8") as fh:
        return parse_bath(fh.read())


# ---------------------------------------------------------------------------
# Ohmic bath with Gaussian cutoff, J(w) = eta w exp(-(w/wc)^2)
#
# The Gaussian (rather than exponential) cutoff keeps J(w) coth(w/2T) even and
# analytic, so h(tau) decays exponentially instead of like 1/tau^2.


def _ohmic_thermal_weight(w, eta, cutoff, temperature):
    """``J(w) coth(w / 2T)``, continuous at ``w = 0``."""
    if w < 1e-12:
        return 2.0 * eta * temperature
    return eta * w * np.exp(-((w / cutoff) ** 2)) / np.tanh(w / (2.0 * temperature))


def ohmic_correlation(taus, eta, cutoff, temperature, epsabs=1e-13):
    """``h(tau) = 1/pi int_0^inf J(w) [coth(w/2T) cos(w tau) - i sin(w tau)] dw``.

    The integral is cut at ``w = 7 cutoff``, where ``J`` is below
    ``e^{-49}`` of its scale.
    """
    from scipy.integrate import quad

    top = 7.0 * cutoff
    fr = lambda w: _ohmic_thermal_weight(w, eta, cutoff, temperature)
    fi = lambda w: eta * w * np.exp(-((w / cutoff) ** 2))
    opts = dict(epsabs=epsabs, epsrel=1e-12, limit=2000)
    out = np.empty(len(taus), dtype=complex)
    for k, tau in enumerate(taus):
        if tau == 0:
            re = quad(fr, 0, top, **opts)[0]
            im = 0.0
        else:
            re = quad(fr, 0, top, weight="cos", wvar=tau, **opts)[0]
            im = -quad(fi, 0, top, weight="sin", wvar=tau, **opts)[0]
        out[k] = (re + 1j * im) / np.pi
    return out


def ohmic_spectral(omegas, eta, cutoff, temperature):
    """Fourier transform ``h^(w) = int e^{i w tau} h(tau) dtau``:
    ``2 J(w)(n(w) + 1)`` for ``w > 0`` and ``2 J(|w|) n(|w|)`` for ``w < 0``."""
    w = np.asarray(omegas, dtype=float)
    small = np.abs(w) < 1e-12
    ws = np.where(small, 1.0, w)
    # J is odd, so 2 J(w) / (1 - e^{-w/T}) covers both signs
    out = 2.0 * eta * ws * np.exp(-((ws / cutoff) ** 2)) / -np.expm1(-ws / temperature)
    return np.where(small, 2.0 * eta * temperature, out)


def ohmic_correlation_table(eta, cutoff, temperature, tau_max, points=801):
    taus = np.linspace(0.0, tau_max, points)
    return BathSpec("correlation", taus, ohmic_correlation(taus, eta, cutoff, temperature))


def ohmic_spectral_table(eta, cutoff, temperature, omega_max, points=801, include=()):
    """Spectral table on a uniform grid, with the frequencies in ``include``
    inserted exactly so that lookups there involve no interpolation."""
    grid = np.union1d(np.linspace(-omega_max, omega_max, points), np.asarray(include, dtype=float))
    return BathSpec("spectral", grid, ohmic_spectral(grid, eta, cutoff, temperature))
