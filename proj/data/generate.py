# Copyright 2026 The pipesearch Authors.
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
"""Regenerates the bundled example datasets. Output is deterministic."""

import csv
import math
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent


def write(name, header, rows):
    with open(HERE / name, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def fmt(x):
    return f"{x:.4f}"


def blobs(rng):
    centers = {"setosa": (0.0, 0.0, 1.0, 0.5), "versicolor": (3.0, 1.5, 4.0, 1.5), "virginica": (5.0, 3.5, 5.5, 2.5)}
    rows = []
    for label, c in centers.items():
        for _ in range(50):
            rows.append([fmt(v + rng.gauss(0, 0.8)) for v in c] + [label])
    rng.shuffle(rows)
    write("blobs.csv", ["f1", "f2", "f3", "f4", "species"], rows)


def moons(rng):
    rows = []
    for i in range(500):
        cls = i % 2
        t = rng.uniform(0, math.pi)
        if cls == 0:
            x, y = math.cos(t), math.sin(t)
        else:
            x, y = 1 - math.cos(t), 0.5 - math.sin(t)
        x += rng.gauss(0, 0.15)
        y += rng.gauss(0, 0.15)
        region = rng.choice(["north", "south"] if cls == 0 else ["south", "east"])
        rows.append([fmt(x), fmt(y), fmt(rng.gauss(0, 1)), region, "upper" if cls == 0 else "lower"])
    rng.shuffle(rows)
    write("moons.csv", ["x", "y", "noise", "region", "moon"], rows)


def shop(rng):
    # four imbalanced classes, categorical columns and missing cells
    classes = [("basic", 400), ("plus", 300), ("pro", 200), ("enterprise", 100)]
    rows = []
    for idx, (label, n) in enumerate(classes):
        for _ in range(n):
            seats = max(1.0, rng.gauss(2 + 6 * idx, 2.0))
            spend = rng.gauss(20 + 35 * idx, 12.0)
            tenure = rng.gauss(12 + 3 * idx, 8.0)
            channel = rng.choices(["web", "partner", "sales"], weights=[6 - idx, 2 + idx, 1 + 2 * idx])[0]
            country = rng.choice(["nl", "de", "us", "fr"])
            cells = [fmt(seats), fmt(spend), fmt(tenure), channel, country]
            for j in range(len(cells)):
                if rng.random() < 0.04:
                    cells[j] = ""
            rows.append(cells + [label])
    rng.shuffle(rows)
    write("shop.csv", ["seats", "monthly_spend", "tenure_months", "channel", "country", "plan"], rows)


if __name__ == "__main__":
    blobs(random.Random(1))
    moons(random.Random(2))
    shop(random.Random(3))
