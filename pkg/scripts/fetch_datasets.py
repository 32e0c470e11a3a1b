#!/usr/bin/env python3
"""Fetch or convert the real datasets used by the analyses.

The package does not bundle the Old Faithful, crabs, fish-catch, or enzyme
data.  This script populates the data directory (./data by default, or
$NIGMIX_DATA) in one of two ways:

* ``--download``: pull the CSVs from public mirrors.  Requires outbound
  network access.
* ``--convert SRC.csv NAME``: normalize a CSV you exported yourself (for
  example from R: ``write.csv(faithful, "faithful_raw.csv")``) into the
  schema the loaders expect.

Expected final schemas:

* faithful.csv: columns eruptions, waiting (272 rows)
* crabs.csv: columns class4, FL, RW, CL, CW, BD (200 rows), where class4
  codes the species-by-sex cross as B-M=1, B-F=2, O-M=3, O-F=4
* fish.csv: column Species plus Weight, Length1, Length2, Length3,
  Height, Width (159 rows, fishcatch; rows with missing values kept)
* enzyme.csv: column activity (245 rows)
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import urllib.request
from pathlib import Path

SOURCES = {
    "faithful.csv": "https://vincentarelbundock.github.io/Rdatasets/csv/datasets/faithful.csv",
    "crabs.csv": "https://vincentarelbundock.github.io/Rdatasets/csv/MASS/crabs.csv",
    "fish.csv": "https://vincentarelbundock.github.io/Rdatasets/csv/rrcov/fish.csv",
    "enzyme.csv": "https://vincentarelbundock.github.io/Rdatasets/csv/mixAK/Enzyme.csv",
}

# Columns to keep per target, in order; None keeps everything.
KEEP = {
    "faithful.csv": ["eruptions", "waiting"],
    "crabs.csv": ["class4", "FL", "RW", "CL", "CW", "BD"],
    "fish.csv": ["Species", "Weight", "Length1", "Length2", "Length3",
                 "Height", "Width"],
    "enzyme.csv": ["activity"],
}

# Alternative header spellings seen in the wild, mapped to ours.
ALIASES = {
    "eruption": "eruptions",
    "wait": "waiting",
    "species": "Species",
    "weight": "Weight",
    "length1": "Length1",
    "length2": "Length2",
    "length3": "Length3",
    "height": "Height",
    "width": "Width",
    "Activity": "activity",
    "enzyme": "activity",
}


def data_dir() -> Path:
    return Path(os.environ.get("NIGMIX_DATA", "data"))


_CRAB_CLASS = {("B", "M"): "1", ("B", "F"): "2", ("O", "M"): "3", ("O", "F"): "4"}


def normalize(rows: list[dict], target: str) -> list[dict]:
    keep = KEEP[target]
    out = []
    for row in rows:
        fixed = {}
        for key, value in row.items():
            if key is None:
                continue
            name = ALIASES.get(key.strip(), key.strip())
            fixed[name] = "" if value is None else value.strip()
        if target == "crabs.csv" and "class4" not in fixed:
            try:
                fixed["class4"] = _CRAB_CLASS[(fixed["sp"], fixed["sex"])]
            except KeyError:
                raise SystemExit(
                    "crabs.csv: need either a class4 column or sp/sex columns"
                ) from None
        missing = [c for c in keep if c not in fixed]
        if missing:
            raise SystemExit(
                f"{target}: source is missing columns {missing}; "
                f"found {sorted(fixed)}"
            )
        out.append({c: fixed[c] for c in keep})
    return out


def write_csv(path: Path, rows: list[dict], target: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=KEEP[target])
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def read_csv(path: Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def download_all() -> int:
    failures = 0
    for target, url in SOURCES.items():
        dest = data_dir() / target
        try:
            with urllib.request.urlopen(url, timeout=30) as resp:
                text = resp.read().decode("utf-8")
        except OSError as exc:
            print(f"FAILED {target}: {exc}", file=sys.stderr)
            failures += 1
            continue
        rows = list(csv.DictReader(text.splitlines()))
        write_csv(dest, normalize(rows, target), target)
    if failures:
        print(
            f"{failures} download(s) failed; export the data from R and use "
            "--convert instead",
            file=sys.stderr,
        )
    return 1 if failures else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    mode = parser.add_mutually_exclusive_group(required=True)
    mode.add_argument("--download", action="store_true",
                      help="download every dataset from public mirrors")
    mode.add_argument("--convert", nargs=2, metavar=("SRC", "NAME"),
                      help="normalize a local CSV into data/NAME")
    args = parser.parse_args(argv)

    if args.download:
        return download_all()
    src, name = args.convert
    if name not in KEEP:
        parser.error(f"NAME must be one of {sorted(KEEP)}")
    rows = normalize(read_csv(Path(src)), name)
    write_csv(data_dir() / name, rows, name)
    return 0


if __name__ == "__main__":
    sys.exit(main())
