"""JSON generator and state files.

Every file is an object with ``"format_version": 1`` and a ``"format"`` tag.
Complex matrices are nested lists whose leaves are ``[re, im]`` pairs.

Generator formats::

    {"format": "gks", "dim": N, "H": M, "C": M}          (Gell-Mann basis)
    {"format": "lindblad", "dim": N, "H": M, "jumps": [M, ...]}
    {"format": "superop", "dim": N, "L": M}              (column stacking)
    {"format": "zoo:<name>", "params": {...}}

State format::

    {"format": "state", "dim": N, "rho": M}
"""
import hashlib
import json
from pathlib import Path

import numpy as np

from .basis import gell_mann_basis
from .generators import GksGenerator, LindbladGenerator, Superoperator
from .zoo import ZOO, build_zoo

FORMAT_VERSION = 1


class SpecError(ValueError):
    """Malformed or inconsistent spec file; carries a location when known."""

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


def encode_matrix(m):
    m = np.asarray(m, dtype=complex)
    return np.stack([m.real, m.imag], axis=-1).tolist()


def decode_matrix(obj, shape=None, name="matrix"):
    try:
        a = np.asarray(obj, dtype=float)
    except (TypeError, ValueError):
        raise SpecError(f"{name}: not a nested list of [re, im] pairs") from None
    if a.ndim < 1 or a.shape[-1] != 2:
        raise SpecError(f"{name}: entries must be [re, im] pairs")
    m = a[..., 0] + 1j * a[..., 1]
    if shape is not None and m.shape != tuple(shape):
        raise SpecError(f"{name}: expected shape {tuple(shape)}, got {m.shape}")
    return m


def _loads(text):
    if not text.strip():
        raise SpecError("empty file", 1, 1)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(obj, dict):
        raise SpecError("top level must be a JSON object")
    version = obj.get("format_version")
    if version != FORMAT_VERSION:
        raise SpecError(f"unsupported or missing format_version {version!r}")
    if not isinstance(obj.get("format"), str):
        raise SpecError("missing 'format' tag")
    return obj


def _dim(obj):
    n = obj.get("dim")
    if not isinstance(n, int) or n < 2:
        raise SpecError(f"'dim' must be an integer >= 2, got {n!r}")
    return n


def _encode_params(entry, params):
    out = {}
    for k, v in params.items():
        if v is None:
            out[k] = None
        elif k in entry.matrix_params:
            out[k] = encode_matrix(v)
        elif k in entry.matrix_list_params:
            out[k] = [encode_matrix(x) for x in v]
        else:
            out[k] = v
    return out


def _decode_params(entry, params):
    out = {}
    for k, v in params.items():
        if v is None or k not in entry.matrix_params + entry.matrix_list_params:
            out[k] = v
        elif k in entry.matrix_params:
            out[k] = decode_matrix(v, name=k)
        else:
            out[k] = [decode_matrix(x, name=k) for x in v]
    return out


def generator_from_obj(obj, base_dir=None):
    """Generator described by a parsed spec object."""
    fmt = obj["format"]
    try:
        if fmt == "gks":
            n = _dim(obj)
            h = decode_matrix(obj.get("H"), (n, n), "H")
            c = decode_matrix(obj.get("C"), (n * n - 1, n * n - 1), "C")
            return GksGenerator(h, c, gell_mann_basis(n))
        if fmt == "lindblad":
            n = _dim(obj)
            h = decode_matrix(obj.get("H"), (n, n), "H")
            jumps = tuple(decode_matrix(v, (n, n), f"jumps[{k}]") for k, v in enumerate(obj.get("jumps", [])))
            return LindbladGenerator(h, jumps)
        if fmt == "superop":
            n = _dim(obj)
            return Superoperator(decode_matrix(obj.get("L"), (n * n, n * n), "L"))
        if fmt.startswith("zoo:"):
            name = fmt[4:]
            if name not in ZOO:
                raise SpecError(f"unknown zoo entry {name!r}")
            params = obj.get("params", {})
            if not isinstance(params, dict):
                raise SpecError("'params' must be an object")
            return build_zoo(name, _decode_params(ZOO[name], params), base_dir)
    except SpecError:
        raise
    except (KeyError, TypeError) as exc:
        raise SpecError(str(exc).strip("'\"")) from None
    raise SpecError(f"unknown format {fmt!r}")


def load_generator(path):
    path = Path(path)
    obj = _loads(path.read_text(encoding="utf-8"))
    return generator_from_obj(obj, path.parent), obj


def generator_to_obj(g):
    """Spec object for a GKS, Lindblad or superoperator generator."""
    if isinstance(g, GksGenerator):
        if g.basis.name != gell_mann_basis(g.dim).name:
            raise ValueError("only Gell-Mann-basis GKS generators can be written")
        return {"format_version": FORMAT_VERSION, "format": "gks", "dim": g.dim,
                "H": encode_matrix(g.H), "C": encode_matrix(g.C)}
    if isinstance(g, LindbladGenerator):
        return {"format_version": FORMAT_VERSION, "format": "lindblad", "dim": g.dim,
                "H": encode_matrix(g.H), "jumps": [encode_matrix(v) for v in g.jumps]}
    if isinstance(g, Superoperator):
        return {"format_version": FORMAT_VERSION, "format": "superop", "dim": g.dim,
                "L": encode_matrix(g.mat)}
    raise TypeError(f"cannot serialize {type(g).__name__}")


def zoo_obj(name, params=None):
    entry = ZOO[name]
    p = dict(entry.defaults)
    p.update(params or {})
    return {"format_version": FORMAT_VERSION, "format": f"zoo:{name}", "params": _encode_params(entry, p)}


def state_from_obj(obj):
    if obj["format"] != "state":
        raise SpecError(f"expected a state file, got format {obj['format']!r}")
    n = _dim(obj)
    return decode_matrix(obj.get("rho"), (n, n), "rho")


def load_state(path):
    return state_from_obj(_loads(Path(path).read_text(encoding="utf-8")))


def state_to_obj(rho):
    rho = np.asarray(rho, dtype=complex)
    return {"format_version": FORMAT_VERSION, "format": "state", "dim": rho.shape[0], "rho": encode_matrix(rho)}


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def fingerprint(obj):
    """sha256 of the canonical JSON form."""
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
