#!/usr/bin/env python3
# Copyright (C) 2026 epiforecast contributors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Rebuild data/iran_covid19.csv from half-monthly cumulative anchors.

The anchors are approximate public national totals for Iran (confirmed,
deaths, recovered).  Days between anchors are filled by monotone (PCHIP)
interpolation of the cumulative curve, a mild weekly reporting cycle and
seeded multiplicative noise on the daily increments.  Each anchor is hit
exactly.  The output is a stand-in with the right shape and scale; it is
not an official record.

Usage: reconstruct_iran_dataset.py [output.csv]
"""

import datetime as dt
import sys

import numpy as np
from scipy.interpolate import PchipInterpolator

START = dt.date(2020, 2, 26)
END = dt.date(2021, 3, 12)

# date, confirmed, deaths, recovered
ANCHORS = [
    ("2020-02-26", 139, 19, 49),
    ("2020-03-01", 978, 54, 175),
    ("2020-03-08", 6566, 194, 2134),
    ("2020-03-15", 13938, 724, 4590),
    ("2020-03-22", 21638, 1685, 7931),
    ("2020-03-31", 44605, 2898, 14656),
    ("2020-04-15", 76389, 4777, 49933),
    ("2020-04-30", 94640, 6028, 75103),
    ("2020-05-15", 116635, 6854, 91836),
    ("2020-05-31", 151466, 7797, 118848),
    ("2020-06-15", 189876, 8950, 150590),
    ("2020-06-30", 227662, 10817, 189000),
    ("2020-07-15", 264561, 13410, 227561),
    ("2020-07-31", 304204, 16766, 262000),
    ("2020-08-15", 341070, 19492, 295630),
    ("2020-08-31", 373570, 21462, 322000),
    ("2020-09-15", 402029, 23157, 345801),
    ("2020-09-30", 453637, 25779, 374000),
    ("2020-10-15", 526490, 30123, 423921),
    ("2020-10-31", 606873, 34864, 483000),
    ("2020-11-15", 762068, 41034, 539000),
    ("2020-11-30", 948749, 48246, 660000),
    ("2020-12-15", 1108269, 52196, 800000),
    ("2020-12-31", 1225142, 55223, 1000000),
    ("2021-01-15", 1305339, 56538, 1096000),
    ("2021-01-31", 1411731, 57959, 1198000),
    ("2021-02-15", 1534000, 58945, 1305000),
    ("2021-02-28", 1631169, 59980, 1398000),
    ("2021-03-12", 1724000, 61069, 1476000),
]

# Relative reporting level by weekday (Mon..Sun).
WEEKLY = np.array([1.06, 1.04, 1.02, 1.00, 0.90, 0.94, 1.04])
SEED = 20210312


def build_column(days, anchor_days, anchor_values, weekdays, rng):
    interp = PchipInterpolator(anchor_days, anchor_values)
    smooth = interp(days)
    increments = np.diff(smooth)
    noisy = increments * WEEKLY[weekdays[1:]] * rng.uniform(0.92, 1.08, size=increments.size)
    out = np.empty(days.size)
    out[0] = anchor_values[0]
    # Rescale each inter-anchor block so that the anchor totals are exact.
    for lo, hi, vlo, vhi in zip(anchor_days[:-1], anchor_days[1:], anchor_values[:-1], anchor_values[1:]):
        block = noisy[lo:hi]
        total = block.sum()
        target = vhi - vlo
        block = block * (target / total) if total > 0 else np.full(block.size, target / block.size)
        running = vlo + np.cumsum(block)
        out[lo + 1:hi + 1] = running
    ints = np.rint(out).astype(np.int64)
    ints = np.maximum.accumulate(ints)
    for d, v in zip(anchor_days, anchor_values):
        assert ints[d] == v, (d, ints[d], v)
    return ints


def main():
    path = sys.argv[1] if len(sys.argv) > 1 else "data/iran_covid19.csv"
    n = (END - START).days + 1
    assert n == 381
    days = np.arange(n)
    dates = [START + dt.timedelta(days=int(i)) for i in days]
    weekdays = np.array([d.weekday() for d in dates])
    anchor_days = np.array([(dt.date.fromisoformat(a[0]) - START).days for a in ANCHORS])
    rng = np.random.default_rng(SEED)
    cols = [build_column(days, anchor_days, np.array([a[k] for a in ANCHORS], dtype=float), weekdays, rng)
            for k in (1, 2, 3)]
    with open(path, "w", newline="\n") as f:
        f.write("Date,Confirmed,Deaths,Recovered\n")
        for i, d in enumerate(dates):
            f.write(f"{d.isoformat()},{cols[0][i]},{cols[1][i]},{cols[2][i]}\n")


if __name__ == "__main__":
    main()
