"""Fit the frozen VAR(2) expectations system on the bundled quarterly history.

Writes data/var_expectations.json. Intercepts are estimated and discarded;
the model feeds the system deviations from its expectations anchor.
"""
import csv
import json
from pathlib import Path

import numpy as np

DATA = Path(__file__).resolve().parent.parent / "data"
COLUMNS = ["pce_rate", "ffr", "output_gap"]
LAGS = 2


def load():
    rows = []
    with open(DATA / "inflation_quarterly.csv") as f:
        for rec in csv.DictReader(f):
            if all(rec[c] != "" for c in COLUMNS):
                rows.append([float(rec[c]) for c in COLUMNS])
    return np.array(rows)


def main():
    z = load()
    n = len(z) - LAGS
    X = np.ones((n, 1 + 3 * LAGS))
    for lag in range(1, LAGS + 1):
        X[:, 1 + 3 * (lag - 1):1 + 3 * lag] = z[LAGS - lag:len(z) - lag]
    Y = z[LAGS:]
    beta, *_ = np.linalg.lstsq(X, Y, rcond=None)
    coeffs = [beta[1 + 3 * lag:4 + 3 * lag].T.tolist() for lag in range(LAGS)]
    comp = np.zeros((3 * LAGS, 3 * LAGS))
    for lag in range(LAGS):
        comp[:3, 3 * lag:3 * lag + 3] = coeffs[lag]
    comp[3:, :-3] = np.eye(3 * (LAGS - 1))
    radius = max(abs(np.linalg.eigvals(comp)))
    out = {"variables": COLUMNS, "lags": LAGS, "sample": "1990Q1-2012Q2",
           "spectral_radius": round(float(radius), 6), "coeffs": coeffs}
    (DATA / "var_expectations.json").write_text(json.dumps(out, indent=2) + "\n")
    print(f"n={n} spectral radius {radius:.4f}")


if __name__ == "__main__":
    main()
