"""Regenerate the packaged Redfield bath table and positivity-violation witness.

Builds an Ohmic correlation table (Gaussian cutoff), assembles the Redfield
generator for a qubit with sx coupling, propagates 100 random pure states on a
time grid and stores the most negative eigenvalue found, together with the
state and time that produce it.

    python scripts/make_redfield_golden.py
"""
import json
from pathlib import Path

import numpy as np

from semigroup_forge.bath import ohmic_correlation_table, write_bath
from semigroup_forge.semigroup import evolve_exact
from semigroup_forge.specio import encode_matrix, zoo_obj
from semigroup_forge.zoo import build_zoo

DATA = Path(__file__).resolve().parents[1] / "src" / "semigroup_forge" / "data"
ETA, CUTOFF, TEMPERATURE, TAU_MAX, POINTS = 0.1, 3.0, 0.5, 20.0, 801
SEED, SAMPLES = 1976, 100
TIMES = np.linspace(0.0, 5.0, 501)


def main():
    DATA.mkdir(exist_ok=True)
    table = ohmic_correlation_table(ETA, CUTOFF, TEMPERATURE, TAU_MAX, POINTS)
    (DATA / "redfield_ohmic_bath.txt").write_text(write_bath(table), encoding="utf-8")

    spec = zoo_obj("redfield")
    gen = build_zoo("redfield")
    rng = np.random.default_rng(SEED)
    best = (np.inf, None, None)
    for _ in range(SAMPLES):
        psi = rng.normal(size=2) + 1j * rng.normal(size=2)
        psi /= np.linalg.norm(psi)
        rho0 = np.outer(psi, psi.conj())
        traj = evolve_exact(gen, rho0, TIMES)
        k = int(np.argmin(traj.lambda_min))
        if traj.lambda_min[k] < best[0]:
            best = (float(traj.lambda_min[k]), rho0, float(TIMES[k]))
    lam, rho0, t = best
    witness = {
        "format_version": 1,
        "format": "redfield_witness",
        "bath": {"eta": ETA, "cutoff": CUTOFF, "temperature": TEMPERATURE,
                 "tau_max": TAU_MAX, "points": POINTS},
        "search": {"seed": SEED, "samples": SAMPLES, "t_max": float(TIMES[-1]), "steps": len(TIMES) - 1},
        "spec": spec,
        "rho0": encode_matrix(rho0),
        "t": t,
        "lambda_min": lam,
    }
    (DATA / "redfield_witness.json").write_text(json.dumps(witness, indent=2, sort_keys=True) + "\n")
    print(f"lambda_min = {lam:.6g} at t = {t:g}")


if __name__ == "__main__":
    main()
