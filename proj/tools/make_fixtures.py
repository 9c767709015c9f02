#!/usr/bin/env python3
"""Regenerate the bundled historical fixtures under data/.

The series are approximate reconstructions of the public FRED releases
(UNRATE, LNS12300060, LNS11300060, PCEPI, ECI compensation, EFFR, CBO
output gap and natural rate), transcribed at monthly or quarterly
resolution. They are rounded the way the source publishes them. Modern
vintages differ from the 2012 vintages, so treat them as snapshots, not
as the official numbers.
"""
import csv
import math
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data"

UNRATE = [
    # 1990
    5.4, 5.3, 5.2, 5.4, 5.4, 5.2, 5.5, 5.7, 5.9, 5.9, 6.2, 6.3,
    6.4, 6.6, 6.8, 6.7, 6.9, 6.9, 6.8, 6.9, 6.9, 7.0, 7.0, 7.3,
    7.3, 7.4, 7.4, 7.4, 7.6, 7.8, 7.7, 7.6, 7.6, 7.3, 7.4, 7.4,
    7.3, 7.1, 7.0, 7.1, 7.1, 7.0, 6.9, 6.8, 6.7, 6.8, 6.6, 6.5,
    6.6, 6.6, 6.5, 6.4, 6.1, 6.1, 6.1, 6.0, 5.9, 5.8, 5.6, 5.5,
    5.6, 5.4, 5.4, 5.8, 5.6, 5.6, 5.7, 5.7, 5.6, 5.5, 5.6, 5.6,
    5.6, 5.5, 5.5, 5.6, 5.6, 5.3, 5.5, 5.1, 5.2, 5.2, 5.4, 5.4,
    5.3, 5.2, 5.2, 5.1, 4.9, 5.0, 4.9, 4.8, 4.9, 4.7, 4.6, 4.7,
    4.6, 4.6, 4.7, 4.3, 4.4, 4.5, 4.5, 4.5, 4.6, 4.5, 4.4, 4.4,
    4.3, 4.4, 4.2, 4.3, 4.2, 4.3, 4.3, 4.2, 4.2, 4.1, 4.1, 4.0,
    # 2000
    4.0, 4.1, 4.0, 3.8, 4.0, 4.0, 4.0, 4.1, 3.9, 3.9, 3.9, 3.9,
    4.2, 4.2, 4.3, 4.4, 4.3, 4.5, 4.6, 4.9, 5.0, 5.3, 5.5, 5.7,
    5.7, 5.7, 5.7, 5.9, 5.8, 5.8, 5.8, 5.7, 5.7, 5.7, 5.9, 6.0,
    5.8, 5.9, 5.9, 6.0, 6.1, 6.3, 6.2, 6.1, 6.1, 6.0, 5.8, 5.7,
    5.7, 5.6, 5.8, 5.6, 5.6, 5.6, 5.5, 5.4, 5.4, 5.5, 5.4, 5.4,
    5.3, 5.4, 5.2, 5.2, 5.1, 5.0, 5.0, 4.9, 5.0, 5.0, 5.0, 4.9,
    4.7, 4.8, 4.7, 4.7, 4.6, 4.6, 4.7, 4.7, 4.5, 4.4, 4.5, 4.4,
    4.6, 4.5, 4.4, 4.5, 4.4, 4.6, 4.7, 4.6, 4.7, 4.7, 4.7, 5.0,
    5.0, 4.9, 5.1, 5.0, 5.4, 5.6, 5.8, 6.1, 6.1, 6.5, 6.8, 7.3,
    7.8, 8.3, 8.7, 9.0, 9.4, 9.5, 9.5, 9.6, 9.8, 10.0, 9.9, 9.9,
    # 2010
    9.8, 9.8, 9.9, 9.9, 9.6, 9.4, 9.4, 9.5, 9.5, 9.4, 9.8, 9.3,
    9.1, 9.0, 9.0, 9.1, 9.0, 9.1, 9.0, 9.0, 9.0, 8.8, 8.6, 8.5,
    8.3, 8.3, 8.2, 8.2, 8.2, 8.2,
]

# Prime-age employment-population ratio, anchors at (year, month) -> value;
# months in between are linearly interpolated and lightly jittered before
# rounding to one decimal, which mimics the published month-to-month noise.
EPOP_ANCHORS = [
    ((1990, 1), 80.2), ((1990, 6), 80.1), ((1990, 12), 79.6),
    ((1991, 6), 78.9), ((1991, 12), 78.7), ((1992, 6), 78.6),
    ((1992, 12), 78.7), ((1993, 6), 78.9), ((1993, 12), 79.3),
    ((1994, 6), 79.5), ((1994, 12), 79.9), ((1995, 6), 79.8),
    ((1995, 12), 80.0), ((1996, 6), 80.2), ((1996, 12), 80.5),
    ((1997, 6), 80.8), ((1997, 12), 81.1), ((1998, 6), 81.2),
    ((1998, 12), 81.4), ((1999, 6), 81.5), ((1999, 12), 81.7),
    ((2000, 4), 81.9), ((2000, 12), 81.6), ((2001, 6), 81.0),
    ((2001, 12), 80.0), ((2002, 6), 79.6), ((2002, 12), 79.3),
    ((2003, 6), 79.0), ((2003, 12), 79.1), ((2004, 6), 79.2),
    ((2004, 12), 79.3), ((2005, 6), 79.5), ((2005, 12), 79.7),
    ((2006, 6), 79.9), ((2006, 12), 80.1), ((2007, 6), 80.1),
    ((2007, 12), 79.8), ((2008, 6), 79.3), ((2008, 12), 77.7),
    ((2009, 6), 75.9), ((2009, 12), 75.0), ((2010, 6), 75.1),
    ((2010, 12), 74.9), ((2011, 6), 75.0), ((2011, 12), 75.3),
    ((2012, 6), 75.7),
]

# Prime-age participation, not seasonally adjusted: smooth anchors plus a
# fixed within-year pattern.
LFPR_ANCHORS = [
    ((1990, 1), 83.4), ((1992, 6), 83.6), ((1995, 6), 83.5),
    ((1997, 6), 84.0), ((1999, 6), 84.0), ((2000, 6), 84.0),
    ((2002, 6), 83.3), ((2004, 6), 82.8), ((2006, 6), 82.9),
    ((2008, 6), 83.1), ((2010, 6), 82.2), ((2012, 6), 81.6),
]
LFPR_SEASONAL = [-0.35, -0.25, -0.15, -0.10, 0.00, 0.30,
                 0.35, 0.20, 0.00, 0.05, 0.00, -0.05]

# Quarterly, 1990Q1 onward.
PCE_RATE = [
    4.6, 4.5, 4.7, 5.0, 4.0, 3.5, 3.2, 2.9, 2.9, 2.8, 2.6, 2.5,
    2.4, 2.4, 2.2, 2.1, 2.0, 2.0, 2.1, 2.0, 2.1, 2.1, 2.0, 1.9,
    1.9, 2.0, 2.0, 2.1, 2.1, 1.8, 1.6, 1.4, 0.9, 0.8, 0.8, 0.8,
    1.1, 1.4, 1.7, 2.1, 2.6, 2.5, 2.5, 2.5, 2.2, 2.2, 1.9, 1.3,
    1.0, 1.1, 1.4, 1.8, 2.3, 1.8, 2.0, 1.9, 2.0, 2.7, 2.5, 2.8,
    2.8, 2.6, 3.0, 3.1, 3.0, 3.0, 2.6, 2.0, 2.3, 2.4, 2.4, 3.3,
    3.5, 3.7, 4.1, 1.6, 0.6, -0.2, -0.8, 1.4, 2.2, 1.6, 1.3, 1.3,
    1.7, 2.5, 2.8, 2.5, 2.3, 1.6,
    # 2012Q3 onward
    1.6, 1.7, 1.3, 1.1, 1.2, 1.2, 1.3, 1.6, 1.5, 1.1, 0.2, 0.2,
    0.3, 0.4, 0.9, 0.9, 1.1, 1.6, 2.0, 1.5, 1.6, 1.8, 2.0, 2.3,
    2.2, 1.9, 1.4, 1.5, 1.4, 1.5, 1.7, 0.6,
]
CORE_PCE_RATE = [
    4.1, 4.2, 4.3, 4.3, 4.0, 3.7, 3.5, 3.3, 3.0, 2.8, 2.7, 2.6,
    2.5, 2.4, 2.3, 2.2, 2.1, 2.0, 2.0, 2.0, 2.1, 2.0, 1.9, 1.9,
    1.8, 1.8, 1.8, 1.8, 1.8, 1.8, 1.7, 1.6, 1.4, 1.4, 1.4, 1.4,
    1.5, 1.5, 1.5, 1.6, 1.8, 1.8, 1.8, 1.9, 2.0, 2.0, 2.0, 1.8,
    1.7, 1.7, 1.7, 1.7, 1.6, 1.5, 1.4, 1.4, 1.6, 1.8, 1.9, 2.0,
    2.1, 2.1, 2.2, 2.2, 2.2, 2.3, 2.4, 2.3, 2.3, 2.1, 2.0, 2.2,
    2.2, 2.3, 2.4, 1.9, 1.6, 1.5, 1.3, 1.5, 1.6, 1.4, 1.2, 1.0,
    1.0, 1.4, 1.6, 1.8, 1.9, 1.8,
    1.7, 1.6, 1.4, 1.3, 1.3, 1.3, 1.4, 1.6, 1.5, 1.4, 1.3, 1.3,
    1.4, 1.4, 1.7, 1.7, 1.7, 1.8, 1.8, 1.6, 1.5, 1.6, 1.9, 2.0,
    2.0, 1.9, 1.6, 1.6, 1.7, 1.7, 1.8, 1.0,
]
ECIWG_RATE = [
    5.4, 5.3, 5.2, 4.9, 4.6, 4.5, 4.4, 4.3, 4.0, 3.7, 3.5, 3.5,
    3.6, 3.6, 3.6, 3.5, 3.2, 3.2, 3.2, 3.0, 2.9, 2.9, 2.7, 2.6,
    2.9, 2.9, 2.9, 3.0, 2.9, 3.0, 3.1, 3.3, 3.3, 3.4, 3.6, 3.5,
    3.0, 3.2, 3.1, 3.4, 4.3, 4.4, 4.3, 4.1, 4.1, 3.9, 4.1, 4.2,
    3.9, 3.7, 3.5, 3.4, 4.0, 3.9, 3.9, 4.0, 3.8, 3.9, 3.7, 3.7,
    3.5, 3.1, 2.9, 2.9, 3.0, 3.1, 3.3, 3.2, 3.4, 3.5, 3.2, 3.3,
    3.3, 3.1, 2.9, 2.6, 2.1, 1.8, 1.5, 1.4, 1.7, 1.9, 2.0, 2.0,
    2.0, 2.2, 2.1, 2.2, 2.1, 1.8,
    1.8, 1.9, 1.7, 1.9, 1.8, 1.9, 2.0, 2.1, 2.2, 2.3, 2.7, 2.3,
    2.1, 2.1, 2.0, 2.5, 2.4, 2.3, 2.5, 2.5, 2.6, 2.6, 2.8, 2.9,
    2.9, 2.9, 2.9, 3.0, 3.0, 3.0, 3.0, 3.0,
]
FFR = [
    8.2, 8.2, 8.2, 7.7, 6.4, 5.9, 5.6, 4.8, 4.0, 3.8, 3.3, 3.0,
    3.0, 3.0, 3.0, 3.0, 3.2, 4.0, 4.5, 5.2, 5.8, 6.0, 5.8, 5.7,
    5.4, 5.2, 5.3, 5.3, 5.3, 5.5, 5.5, 5.5, 5.5, 5.5, 5.5, 4.9,
    4.7, 4.7, 5.1, 5.3, 5.7, 6.3, 6.5, 6.5, 5.6, 4.3, 3.5, 2.1,
    1.7, 1.7, 1.7, 1.4, 1.3, 1.2, 1.0, 1.0, 1.0, 1.0, 1.4, 1.9,
    2.5, 2.9, 3.4, 4.0, 4.5, 4.9, 5.3, 5.3, 5.3, 5.3, 5.1, 4.5,
    3.2, 2.1, 1.9, 0.5, 0.2, 0.2, 0.2, 0.1, 0.1, 0.2, 0.2, 0.2,
    0.2, 0.1, 0.1, 0.1, 0.1, 0.2,
]
OUTPUT_GAP = [
    0.5, 0.3, -0.3, -1.5, -2.5, -2.5, -2.5, -2.6, -2.2, -2.0, -1.8, -1.4,
    -1.8, -1.8, -1.6, -1.2, -1.0, -0.6, -0.5, -0.1, -0.4, -0.7, -0.5, -0.5,
    -0.6, 0.1, 0.2, 0.6, 0.6, 1.0, 1.3, 1.3, 1.7, 1.5, 1.8, 2.4,
    2.4, 2.4, 2.8, 3.5, 2.9, 3.6, 3.0, 2.8, 1.7, 1.5, 0.5, 0.0,
    -0.2, -0.4, -0.4, -0.8, -0.8, -0.6, 0.3, 0.5, 0.3, 0.4, 0.5, 0.6,
    0.9, 0.8, 0.9, 0.9, 1.4, 1.1, 0.8, 1.0, 0.6, 0.9, 1.0, 0.8,
    0.1, 0.0, -1.0, -3.4, -5.2, -5.7, -5.5, -4.8, -4.4, -3.6, -3.2, -2.9,
    -3.6, -3.3, -3.3, -2.4, -2.2, -2.3,
]
NAIRU_ANCHORS = [((1990, 1), 5.9), ((2000, 1), 5.1), ((2008, 1), 5.0),
                 ((2011, 1), 5.5), ((2012, 2), 5.5)]


def interp(anchors, n_periods, per_year, start_year=1990):
    def idx(ym):
        return (ym[0] - start_year) * per_year + ym[1] - 1
    pts = [(idx(k), v) for k, v in anchors]
    out = []
    for i in range(n_periods):
        for (i0, v0), (i1, v1) in zip(pts, pts[1:]):
            if i0 <= i <= i1:
                out.append(v0 + (v1 - v0) * (i - i0) / (i1 - i0))
                break
        else:
            out.append(pts[-1][1])
    return out


def centered_mean(xs, span):
    h = span // 2
    out = []
    for i in range(len(xs)):
        lo, hi = max(0, i - h), min(len(xs), i + h + 1)
        out.append(sum(xs[lo:hi]) / (hi - lo))
    return out


def month_label(i):
    return f"{1990 + i // 12:04d}-{i % 12 + 1:02d}"


def quarter_label(i):
    return f"{1990 + i // 4:04d}Q{i % 4 + 1}"


def write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def main():
    rng = random.Random(20120612)
    n_m = len(UNRATE)
    assert n_m == 270
    # Monthly sampling noise in epop mirrors the noise in unrate through
    # epop = lfpr * (1 - u/100), plus an independent survey component.
    u_smooth = centered_mean(UNRATE, 5)
    epop = [round(v - 0.83 * (UNRATE[i] - u_smooth[i]) + rng.gauss(0.0, 0.1), 1)
            for i, v in enumerate(interp(EPOP_ANCHORS, n_m, 12))]
    lfpr = [round(v + LFPR_SEASONAL[i % 12] + rng.gauss(0.0, 0.05), 1)
            for i, v in enumerate(interp(LFPR_ANCHORS, n_m, 12))]
    write(OUT / "labor_monthly.csv", ["date", "unrate", "epop", "lfpr"],
          [[month_label(i), f"{UNRATE[i]:.1f}", f"{epop[i]:.1f}",
            f"{lfpr[i]:.1f}"] for i in range(n_m)])

    n_q = len(PCE_RATE)
    assert n_q == len(ECIWG_RATE) == len(CORE_PCE_RATE) == 122
    n_hist = len(FFR)
    assert n_hist == len(OUTPUT_GAP) == 90
    nairu = interp(NAIRU_ANCHORS, n_hist * 3, 12)[::3]
    unrate_q = [sum(UNRATE[3 * q:3 * q + 3]) / 3.0 for q in range(n_hist)]
    rows = []
    for q in range(n_q):
        hist = q < n_hist
        rows.append([
            quarter_label(q), f"{PCE_RATE[q]:.1f}", f"{CORE_PCE_RATE[q]:.1f}",
            f"{ECIWG_RATE[q]:.1f}",
            f"{unrate_q[q]:.4f}" if hist else "",
            f"{nairu[q]:.2f}" if hist else "",
            f"{FFR[q]:.2f}" if hist else "",
            f"{OUTPUT_GAP[q]:.1f}" if hist else "",
        ])
    write(OUT / "inflation_quarterly.csv",
          ["date", "pce_rate", "corepce_rate", "eciwg_rate", "unrate",
           "nairu", "ffr", "output_gap"], rows)


if __name__ == "__main__":
    main()
