#!/usr/bin/env python3
"""Regenerate the consensus-baseline fixtures under data/.

These are stylized smooth recovery paths in the spirit of the FOMC's
published projections, not transcriptions of them: the unemployment rate
decays geometrically toward its longer-run value, the policy rate stays at
the lower bound until a fixed liftoff quarter and then rises linearly, and
the remaining series glide between their starting and longer-run values.
"""
import csv
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data"
ELB = 0.125
LFPR = 81.6

VARIABLES = ["ffr", "rgdpch", "unrate", "pce_rate", "epop", "eciwg_rate",
             "rg10", "corepce_rate"]


def quarter_label(year, q, i):
    k = (q - 1) + i
    return f"{year + k // 4}Q{k % 4 + 1}"


def glide(a, b, n, speed):
    """a at i = 0 approaching b geometrically."""
    return [b + (a - b) * (1.0 - speed) ** i for i in range(n)]


def baseline(start, n, u0, u_inf, u_speed, liftoff, ffr_step, ffr_cap,
             pce, core, eci, rg10, growth):
    u = glide(u0, u_inf, n, u_speed)
    ffr = [ELB if i < liftoff else min(ELB + ffr_step * (i - liftoff + 1), ffr_cap)
           for i in range(n)]
    rows = []
    for i in range(n):
        rows.append({
            "period": quarter_label(*start, i),
            "ffr": ffr[i],
            "rgdpch": growth[i],
            "unrate": u[i],
            "pce_rate": pce[i],
            "epop": LFPR * (1.0 - u[i] / 100.0),
            "eciwg_rate": eci[i],
            "rg10": rg10[i],
            "corepce_rate": core[i],
        })
    return rows


def write(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["period"] + VARIABLES)
        for r in rows:
            w.writerow([r["period"]] + [f"{r[v]:.4f}" for v in VARIABLES])


def main():
    # 2012Q3 through 2017Q4, liftoff 2015Q3.
    n = 22
    rows = baseline(
        (2012, 3), n, u0=8.1, u_inf=5.4, u_speed=0.12, liftoff=12,
        ffr_step=0.25, ffr_cap=2.5,
        pce=glide(1.6, 2.0, n, 0.12), core=glide(1.8, 2.0, n, 0.12),
        eci=glide(1.8, 3.3, n, 0.08), rg10=glide(1.7, 3.2, n, 0.08),
        growth=[2.0 + 0.9 * min(i, 8) / 8 - 0.5 * max(0, i - 12) / 9 for i in range(n)])
    write(OUT / "sep_baseline_2012.csv", rows)

    # 2020Q3 through 2024Q4, liftoff 2022Q1.
    n = 18
    growth = [-6.5, -4.5, -2.0, 9.0, 6.0, 5.0, 4.0, 3.2, 2.6, 2.3, 2.1, 2.0,
              1.9, 1.9, 1.8, 1.8, 1.8, 1.8]
    rows = baseline(
        (2020, 3), n, u0=13.0, u_inf=4.6, u_speed=0.2, liftoff=6,
        ffr_step=0.125, ffr_cap=2.0,
        pce=glide(0.8, 2.0, n, 0.15), core=glide(1.0, 2.0, n, 0.15),
        eci=glide(2.7, 3.1, n, 0.1), rg10=glide(0.7, 2.2, n, 0.08),
        growth=growth)
    write(OUT / "sep_baseline_2020.csv", rows)


if __name__ == "__main__":
    main()
