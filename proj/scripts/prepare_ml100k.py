#!/usr/bin/env python3
# Copyright 2026 The div2vec Authors. All Rights Reserved.
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

"""Writes MovieLens-100k as ratings.csv + item_features.csv.

MovieLens may not be redistributed, so it is not part of this repository.
The RecBole wheel ships a copy of ml-100k; this script takes it from a wheel
file, or downloads the wheel with pip when none is given. Item features are
the 19 genre indicators (relevance 1 for each genre a movie carries).
"""

import argparse
import csv
import io
import pathlib
import subprocess
import sys
import tempfile
import zipfile

WHEEL_PREFIX = "recbole/dataset_example/ml-100k/"


def fetch_wheel(dest: pathlib.Path) -> pathlib.Path:
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "--quiet", "--no-deps",
         "-d", str(dest), "recbole==1.2.1"],
        check=True)
    wheels = sorted(dest.glob("recbole-*.whl"))
    if not wheels:
        raise SystemExit("pip download produced no recbole wheel")
    return wheels[0]


def read_member(wheel: zipfile.ZipFile, name: str):
    text = io.TextIOWrapper(wheel.open(WHEEL_PREFIX + name), encoding="latin-1")
    rows = csv.reader(text, delimiter="\t")
    next(rows)  # typed header
    return rows


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out_dir", type=pathlib.Path)
    ap.add_argument("--wheel", type=pathlib.Path)
    args = ap.parse_args()

    args.out_dir.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        wheel_path = args.wheel or fetch_wheel(pathlib.Path(tmp))
        with zipfile.ZipFile(wheel_path) as wheel:
            ratings = 0
            with open(args.out_dir / "ratings.csv", "w", newline="") as out:
                w = csv.writer(out, lineterminator="\n")
                w.writerow(["userId", "movieId", "rating", "timestamp"])
                for user, item, rating, ts in read_member(wheel, "ml-100k.inter"):
                    w.writerow([user, item, f"{float(rating):.1f}", int(float(ts))])
                    ratings += 1

            genres = {}
            cells = []
            for row in read_member(wheel, "ml-100k.item"):
                item, labels = row[0], row[3].split() if len(row) > 3 else []
                for g in labels:
                    cells.append((item, genres.setdefault(g, len(genres) + 1)))
            with open(args.out_dir / "item_features.csv", "w", newline="") as out:
                w = csv.writer(out, lineterminator="\n")
                w.writerow(["movieId", "tagId", "relevance"])
                for item, tag in cells:
                    w.writerow([item, tag, "1"])
    print(f"wrote {ratings} ratings, {len(cells)} genre cells "
          f"({len(genres)} genres) to {args.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
