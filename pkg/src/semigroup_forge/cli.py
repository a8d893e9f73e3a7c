"""Command-line interface.

    semigroup-forge check SPEC [--tol --times --budget --seed --require]
    semigroup-forge evolve SPEC STATE [--t0 --t1 --steps --method --rtol]
    semigroup-forge convert SPEC --to gks|lindblad|kraus@t|choi@t
    semigroup-forge zoo list
    semigroup-forge zoo emit NAME

Exit codes: 0 success (all required verdicts pass), 1 input error,
2 a required verdict fails or the requested conversion does not exist.
"""
import argparse
import io
import json
import sys

import numpy as np

from . import __version__, _backend
from .bath import BathFormatError
from .cp import DEFAULT_SEED, choi_of_superop, is_completely_positive, kraus_from_choi
from .errors import NotCompletelyPositiveError, SemigroupForgeError
from .generators import (
    GksGenerator,
    LindbladGenerator,
    gks_to_lindblad,
    is_gkls,
    lindblad_to_gks,
    superop_to_gks,
    to_superop,
)
from .linalg import dag, herm
from .semigroup import (
    evolve_exact,
    evolve_ode,
    kossakowski_positivity_check,
    propagator,
    spectral_abscissa,
)
from .specio import (
    FORMAT_VERSION,
    SpecError,
    dumps,
    encode_matrix,
    fingerprint,
    generator_to_obj,
    load_generator,
    load_state,
    zoo_obj,
)
from .zoo import ZOO

VERDICTS = ("trace", "hermiticity", "gkls", "cp", "positivity", "abscissa")
EXIT_OK, EXIT_INPUT, EXIT_FAIL = 0, 1, 2
STATE_TOL = 1e-8

INPUT_ERRORS = (SpecError, BathFormatError, SemigroupForgeError, OSError, KeyError, ValueError)


class InputError(Exception):
    pass


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _require_list(text):
    names = [x.strip() for x in text.split(",") if x.strip()]
    if names == ["all"]:
        return list(VERDICTS)
    bad = [x for x in names if x not in VERDICTS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown verdict(s) {bad}; choose from {', '.join(VERDICTS)}")
    return names


def _num(x):
    return float(x)


def _gks_form(g, s):
    if isinstance(g, GksGenerator):
        return g
    if isinstance(g, LindbladGenerator):
        return lindblad_to_gks(g)
    return superop_to_gks(s)


# ---------------------------------------------------------------------------
# check


def diagnostics(g, spec_obj, tol=1e-9, times=(0.1, 1.0), budget=16, seed=DEFAULT_SEED):
    """The report emitted by ``check``, as a dict."""
    s = to_superop(g)
    scale = max(1.0, float(np.linalg.norm(s.mat)))
    v = {}
    td = s.generator_trace_defect()
    v["trace"] = {"passed": td <= tol * scale, "trace_defect": _num(td)}
    hd = s.hermiticity_defect()
    v["hermiticity"] = {"passed": hd <= tol * scale, "hermiticity_defect": _num(hd)}
    try:
        gv = is_gkls(_gks_form(g, s), tol)
        v["gkls"] = {"passed": bool(gv.passed), "kossakowski_min_eigenvalue": _num(gv.value)}
    except SemigroupForgeError as exc:
        v["gkls"] = {"passed": False, "kossakowski_min_eigenvalue": None, "reason": str(exc)}
    cps = []
    for t in times:
        try:
            cv = is_completely_positive(choi_of_superop(propagator(s, t)), tol)
            cps.append({"t": _num(t), "passed": bool(cv.passed), "choi_min_eigenvalue": _num(cv.value)})
        except SemigroupForgeError as exc:
            cps.append({"t": _num(t), "passed": False, "choi_min_eigenvalue": None, "reason": str(exc)})
    v["cp"] = {"passed": all(c["passed"] for c in cps), "samples": cps}
    rep = kossakowski_positivity_check(s, budget=budget, seed=seed)
    v["positivity"] = {
        "passed": bool(rep.passed(tol)),
        "min_pair_value": _num(rep.min_value),
        "trace_defect": _num(rep.trace_defect),
        "witness_phi": encode_matrix(rep.phi),
        "witness_psi": encode_matrix(rep.psi),
    }
    ab = spectral_abscissa(s)
    v["abscissa"] = {"passed": ab <= tol * scale, "spectral_abscissa": _num(ab)}
    return {
        "format_version": FORMAT_VERSION,
        "format": "diagnostics",
        "tool": "semigroup_forge",
        "tool_version": __version__,
        "fingerprint": fingerprint(spec_obj),
        "dim": s.dim,
        "tolerances": {"tol": tol, "times": [_num(t) for t in times], "budget": budget, "seed": seed},
        "verdicts": v,
    }


def cmd_check(args, out):
    g, obj = load_generator(args.spec)
    report = diagnostics(g, obj, args.tol, args.times, args.budget, args.seed)
    required = args.require if args.require is not None else list(VERDICTS)
    report["required"] = required
    report["passed"] = all(report["verdicts"][k]["passed"] for k in required)
    out.write(dumps(report))
    return EXIT_OK if report["passed"] else EXIT_FAIL


# ---------------------------------------------------------------------------
# evolve


def _validate_state(rho, n):
    if rho.shape != (n, n):
        raise InputError(f"state is {rho.shape[0]}x{rho.shape[1]}, generator acts on dimension {n}")
    if abs(np.trace(rho) - 1.0) > STATE_TOL:
        raise InputError(f"not a state: trace {np.trace(rho).real:.12g} != 1")
    if np.max(np.abs(rho - dag(rho))) > STATE_TOL:
        raise InputError("not a state: matrix is not Hermitian")
    lam = np.linalg.eigvalsh(herm(rho))[0]
    if lam < -STATE_TOL:
        raise InputError(f"not a state: eigenvalue {lam:.3g} < 0")


def trajectory_csv(traj, out):
    n = traj.states.shape[1]
    out.write(f"# semigroup_forge trajectory format_version: {FORMAT_VERSION}\n")
    cols = ["t", "tr", "lambda_min", "purity"]
    cols += [f"{p}_{a}_{b}" for a in range(n) for b in range(n) for p in ("re", "im")]
    out.write(",".join(cols) + "\n")
    for k, t in enumerate(traj.times):
        rho = traj.states[k]
        row = [t, traj.trace[k].real, traj.lambda_min[k], traj.purity[k]]
        for z in rho.reshape(-1):
            row += [z.real, z.imag]
        out.write(",".join(format(float(x), ".17g") for x in row) + "\n")


def cmd_evolve(args, out):
    g, _ = load_generator(args.spec)
    rho0 = load_state(args.state)
    s = to_superop(g)
    _validate_state(rho0, s.dim)
    if args.t1 < args.t0 or args.t0 < 0:
        raise InputError("need 0 <= t0 <= t1")
    if args.steps < 1:
        raise InputError("--steps must be >= 1")
    times = np.array([args.t0]) if args.t1 == args.t0 else np.linspace(args.t0, args.t1, args.steps + 1)
    if args.method == "exact":
        traj = evolve_exact(s, rho0, times)
    else:
        traj = evolve_ode(g, rho0, times, rtol=args.rtol)
    trajectory_csv(traj, out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# convert


def _parse_target(text):
    kind, _, t = text.partition("@")
    if kind in ("gks", "lindblad") and not t:
        return kind, None
    if kind in ("kraus", "choi") and t:
        try:
            tv = float(t)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad time in {text!r}") from None
        if tv < 0:
            raise argparse.ArgumentTypeError("time must be nonnegative")
        return kind, tv
    raise argparse.ArgumentTypeError(f"--to must be gks, lindblad, kraus@T or choi@T, got {text!r}")


def cmd_convert(args, out, err):
    g, _ = load_generator(args.spec)
    kind, t = args.to
    s = to_superop(g)
    if kind == "gks":
        obj = generator_to_obj(_gks_form(g, s))
    elif kind == "lindblad":
        if isinstance(g, LindbladGenerator):
            obj = generator_to_obj(g)
        else:
            try:
                obj = generator_to_obj(gks_to_lindblad(_gks_form(g, s), tol=args.tol))
            except NotCompletelyPositiveError as exc:
                err.write(f"error: {exc}\n")
                return EXIT_FAIL
    else:
        choi = choi_of_superop(propagator(s, t))
        if kind == "choi":
            obj = {"format_version": FORMAT_VERSION, "format": "choi", "dim": s.dim, "t": t,
                   "matrix": encode_matrix(choi.mat)}
        else:
            try:
                kr = kraus_from_choi(choi, tol=args.tol)
            except NotCompletelyPositiveError as exc:
                err.write(f"error: {exc}\n")
                return EXIT_FAIL
            obj = {"format_version": FORMAT_VERSION, "format": "kraus", "dim": s.dim, "t": t,
                   "ops": [encode_matrix(k) for k in kr.ops]}
    out.write(dumps(obj))
    return EXIT_OK


# ---------------------------------------------------------------------------
# zoo


def cmd_zoo(args, out):
    if args.zoo_cmd == "list":
        width = max(len(k) for k in ZOO)
        for name in sorted(ZOO):
            out.write(f"{name:<{width}}  {ZOO[name].description}\n")
        return EXIT_OK
    if args.name not in ZOO:
        raise InputError(f"unknown zoo entry {args.name!r}; try 'zoo list'")
    out.write(dumps(zoo_obj(args.name)))
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="semigroup-forge", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("check", help="diagnostics report (JSON)")
    c.add_argument("spec", help="generator spec file (JSON)")
    c.add_argument("--tol", type=float, default=1e-9, help="verdict tolerance (default 1e-9)")
    c.add_argument("--times", type=_float_list, default=[0.1, 1.0], help="comma-separated times for the CP test")
    c.add_argument("--budget", type=int, default=16, help="random restarts of the positivity search")
    c.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"seed of the random starts (default {DEFAULT_SEED})")
    c.add_argument("--require", type=_require_list, default=None,
                   help=f"comma-separated subset of {','.join(VERDICTS)} (default: all)")

    e = sub.add_parser("evolve", help="trajectory (CSV)")
    e.add_argument("spec", help="generator spec file (JSON)")
    e.add_argument("state", help="initial density matrix file (JSON)")
    e.add_argument("--t0", type=float, default=0.0, help="first output time; rho(t) = exp(t L) rho0")
    e.add_argument("--t1", type=float, default=1.0, help="last output time")
    e.add_argument("--steps", type=int, default=10, help="number of intervals between t0 and t1")
    e.add_argument("--method", choices=("exact", "ode"), default="exact",
                   help="matrix exponential or adaptive Runge-Kutta")
    e.add_argument("--rtol", type=float, default=1e-8, help="relative tolerance of the ode method")

    v = sub.add_parser("convert", help="change representation (JSON)")
    v.add_argument("spec", help="generator spec file (JSON)")
    v.add_argument("--to", type=_parse_target, required=True, metavar="TARGET",
                   help="gks, lindblad, kraus@T or choi@T (channel exp(T L))")
    v.add_argument("--tol", type=float, default=1e-9, help="positivity tolerance (default 1e-9)")

    z = sub.add_parser("zoo", help="built-in generators")
    zs = z.add_subparsers(dest="zoo_cmd", required=True)
    zs.add_parser("list", help="names and descriptions")
    ze = zs.add_parser("emit", help="spec file of an entry with default parameters")
    ze.add_argument("name")
    return p


def main(argv=None, stdout=None, stderr=None):
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    _backend.apply_thread_cap()
    buf = io.StringIO()
    try:
        if args.cmd == "check":
            code = cmd_check(args, buf)
        elif args.cmd == "evolve":
            code = cmd_evolve(args, buf)
        elif args.cmd == "convert":
            code = cmd_convert(args, buf, err)
        else:
            code = cmd_zoo(args, buf)
    except (InputError, json.JSONDecodeError) + INPUT_ERRORS as exc:
        msg = str(exc.args[0]) if isinstance(exc, KeyError) and exc.args else str(exc)
        err.write(f"error: {msg}\n")
        return EXIT_INPUT
    out.write(buf.getvalue())
    return code


def entry_point():
    sys.exit(main())
