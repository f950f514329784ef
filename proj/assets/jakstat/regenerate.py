"""Rebuilds model.json and data.csv. Needs numpy and scipy.

The observation data are approximate: a noisy simulation under transient Epo
at a reference parameter point, standing in for the published measurements.
The Epo tables and the initial STAT amount are approximate as well.
"""
import json
import math
import os

import numpy as np
from scipy.integrate import solve_ivp

K = 10
STAT0 = 3.55
THETA_REF = (0.5, 0.5, 0.2, 0.9)
REL_SIGMA, SIGMA_FLOOR, NOISE_SEED = 0.02, 0.01, 7
GRID = [0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 25, 30, 40, 50, 60]
HERE = os.path.dirname(os.path.abspath(__file__))


def transient(t):
    return 2.0 * math.exp(-t / 8.0)


def two_round(t):
    return transient(t) + (1.2 * math.exp(-(t - 30) / 20.0) if t >= 30 else 0.0)


def table(f):
    ts = list(range(0, 21)) + list(range(22, 61, 2))
    return [[t, round(f(t), 4)] for t in ts]


def model():
    states = [
        {"name": "STAT", "initial": STAT0, "rate": f"-k1*STAT*Epo + 2*k4*X{K}"},
        {"name": "STATp", "initial": 0, "rate": "k1*STAT*Epo - k2*STATp^2"},
        {"name": "STATpd", "initial": 0, "rate": "-k3*STATpd + 0.5*k2*STATp^2"},
        {"name": "X1", "initial": 0, "rate": "k3*STATpd - k4*X1"},
    ]
    for j in range(2, K + 1):
        states.append({"name": f"X{j}", "initial": 0, "rate": f"k4*X{j-1} - k4*X{j}"})
    states.append({"name": "STATn", "initial": 0, "rate": f"k3*STATpd - k4*X{K}"})
    return {
        "name": "jakstat",
        "description": "JAK-STAT pathway, 10 delay stages. Initial STAT and the Epo tables are approximate.",
        "parameters": [
            {"name": "k1", "lower": 0, "upper": 5},
            {"name": "k2", "lower": 0, "upper": 30},
            {"name": "k3", "lower": 0, "upper": 1},
            {"name": "k4", "lower": 0, "upper": 5},
        ],
        "inputs": ["Epo"],
        "states": states,
        "observables": [
            {"name": "pSTAT_total", "terms": [{"state": "STATp", "coefficient": 1},
                                              {"state": "STATpd", "coefficient": 2}], "scale": 1},
            {"name": "STAT_cytoplasm", "terms": [{"state": "STAT", "coefficient": 1},
                                                 {"state": "STATp", "coefficient": 1},
                                                 {"state": "STATpd", "coefficient": 2}], "scale": 1},
        ],
        "conditions": {
            "transient": {"Epo": {"interpolation": "linear", "points": table(transient)}},
            "two_round": {"Epo": {"interpolation": "linear", "points": table(two_round)}},
            "sustained": {"Epo": {"interpolation": "constant", "points": [[0, 2.0]]}},
        },
        "time_grid": GRID,
        "integrator": {"abs_tol": 1e-8, "rel_tol": 1e-6, "min_step": 1e-12, "max_steps": 200000},
    }


def data():
    k1, k2, k3, k4 = THETA_REF

    def rhs(t, x):
        s, p, pd, xs = x[0], x[1], x[2], x[3:3 + K]
        e = 2.0 * np.exp(-t / 8.0)
        d = np.zeros_like(x)
        d[0] = -k1 * s * e + 2 * k4 * xs[-1]
        d[1] = k1 * s * e - k2 * p * p
        d[2] = -k3 * pd + 0.5 * k2 * p * p
        d[3] = k3 * pd - k4 * xs[0]
        for j in range(1, K):
            d[3 + j] = k4 * xs[j - 1] - k4 * xs[j]
        d[3 + K] = k3 * pd - k4 * xs[-1]
        return d

    x0 = np.zeros(4 + K)
    x0[0] = STAT0
    y = solve_ivp(rhs, (0, 60), x0, t_eval=np.array(GRID, float), rtol=1e-10, atol=1e-12, max_step=0.25).y
    obs = {"pSTAT_total": y[1] + 2 * y[2], "STAT_cytoplasm": y[0] + y[1] + 2 * y[2]}
    rng = np.random.default_rng(NOISE_SEED)
    lines = ["# Approximate data: synthetic, shaped after published JAK-STAT measurements (transient Epo).",
             "condition,observable,time_min,value,sigma"]
    for name, v in obs.items():
        sig = REL_SIGMA * np.max(np.abs(v)) + SIGMA_FLOOR
        for t, value in zip(GRID, v):
            lines.append(f"transient,{name},{t:g},{value + rng.normal(0, sig):.4f},{sig:.4f}")
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    with open(os.path.join(HERE, "model.json"), "w") as f:
        json.dump(model(), f, indent=2)
    with open(os.path.join(HERE, "data.csv"), "w") as f:
        f.write(data())
