#!/usr/bin/env python3
"""Prepare canonical dataset CSVs under data/.

Every output file has the same shape: comma-separated numeric features, no
header, integer class label in the LAST column, classes numbered 0..L with no
gaps.  data/manifest.json describes each file for the benchmark runner.

Two datasets can be produced from scratch:

  breast-cancer   the Wisconsin Diagnostic table bundled with scikit-learn
  waveform        a seeded draw from the standard CART waveform generator

The rest are converted from the original UCI distribution files, which you
must download yourself (UCI terms) into data/raw/ first.  Run with no
arguments to prepare everything that is available; missing raw files are
reported and skipped.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

DATA = Path(__file__).resolve().parent.parent / "data"
RAW = DATA / "raw"


def write_csv(name: str, features, labels) -> Path:
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if features.ndim != 2 or len(features) != len(labels):
        raise SystemExit(f"{name}: features/labels shape mismatch")
    if not np.isfinite(features).all():
        raise SystemExit(f"{name}: non-finite feature values")
    classes = np.unique(labels)
    if not np.array_equal(classes, np.arange(len(classes))):
        raise SystemExit(f"{name}: labels must be 0..L without gaps, got {classes}")
    out = DATA / name
    with out.open("w", encoding="ascii", newline="\n") as fh:
        for row, lab in zip(features, labels):
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write(f",{int(lab)}\n")
    maj = np.bincount(labels).max() / len(labels)
    print(
        f"PREPARED {out} ({len(labels)} rows, {features.shape[1]} features, "
        f"{len(classes)} classes, majority {100 * maj:.1f}%)"
    )
    return out


def need_raw(*names: str):
    missing = [n for n in names if not (RAW / n).exists()]
    if missing:
        raise FileNotFoundError(
            "missing raw file(s): " + ", ".join(str(RAW / n) for n in missing)
        )
    return [RAW / n for n in names]


def prepare_breast_cancer():
    from sklearn.datasets import load_breast_cancer

    bunch = load_breast_cancer()
    # sklearn's target is 0=malignant, 1=benign; keep it, benign is the
    # majority class (62.7%).
    write_csv("breast_cancer.csv", bunch.data, bunch.target)


def prepare_waveform(seed: int = 20260814, n: int = 5000):
    # The CART waveform generator: three triangular base waves on t=1..21,
    # each class a random convex mix of two of them plus unit Gaussian noise.
    t = np.arange(1, 22, dtype=float)
    h1 = np.maximum(6.0 - np.abs(t - 7.0), 0.0)
    h2 = np.maximum(6.0 - np.abs(t - 15.0), 0.0)
    h3 = np.maximum(6.0 - np.abs(t - 11.0), 0.0)
    pairs = {0: (h1, h2), 1: (h1, h3), 2: (h2, h3)}
    rng = np.random.RandomState(seed)
    labels = rng.randint(0, 3, size=n)
    rows = np.empty((n, 21))
    for i, lab in enumerate(labels):
        a, b = pairs[int(lab)]
        u = rng.uniform()
        rows[i] = u * a + (1.0 - u) * b + rng.normal(size=21)
    write_csv("waveform.csv", rows, labels)


def prepare_german():
    # german.data-numeric: 24 integer attributes, label 1=good/2=bad last.
    (path,) = need_raw("german.data-numeric")
    table = np.loadtxt(path)
    write_csv("german.csv", table[:, :-1], table[:, -1].astype(int) - 1)


def prepare_australian():
    # australian.dat: 14 attributes, space separated, label 0/1 last.
    (path,) = need_raw("australian.dat")
    table = np.loadtxt(path)
    write_csv("australian.csv", table[:, :-1], table[:, -1].astype(int))


def prepare_spambase():
    # spambase.data: 57 attributes, comma separated, label 0/1 last.
    (path,) = need_raw("spambase.data")
    table = np.loadtxt(path, delimiter=",")
    write_csv("spambase.csv", table[:, :-1], table[:, -1].astype(int))


def prepare_hill_valley():
    # The noisy training file: 100 attributes plus 0/1 label, with a header.
    (path,) = need_raw("Hill_Valley_with_noise_Training.data")
    table = np.loadtxt(path, delimiter=",", skiprows=1)
    write_csv("hill_valley.csv", table[:, :-1], table[:, -1].astype(int))


def prepare_movie_review():
    # Text featurization is out of scope; drop a pre-featurized numeric CSV
    # (77 features + 0/1 label last, no header) at data/raw and this recipe
    # just validates and canonicalizes it.
    (path,) = need_raw("movie_review_features.csv")
    table = np.loadtxt(path, delimiter=",")
    write_csv("movie_review.csv", table[:, :-1], table[:, -1].astype(int))


def prepare_abalone():
    # abalone.data: sex,7 measurements,rings.  Sex maps M/F/I -> 0/1/2 and
    # rings bin into three age groups (1-8, 9-10, 11+).
    (path,) = need_raw("abalone.data")
    sex_map = {"M": 0.0, "F": 1.0, "I": 2.0}
    rows, labels = [], []
    for line in path.read_text().splitlines():
        if not line.strip():
            continue
        cells = line.split(",")
        rings = int(cells[-1])
        group = 0 if rings <= 8 else (1 if rings <= 10 else 2)
        rows.append([sex_map[cells[0]]] + [float(v) for v in cells[1:-1]])
        labels.append(group)
    write_csv("abalone.csv", rows, labels)


def prepare_wall_following():
    # sensor_readings_24.data: 24 ultrasound readings plus a direction label.
    (path,) = need_raw("sensor_readings_24.data")
    names = {
        "Move-Forward": 0,
        "Slight-Right-Turn": 1,
        "Sharp-Right-Turn": 2,
        "Slight-Left-Turn": 3,
    }
    rows, labels = [], []
    for line in path.read_text().splitlines():
        if not line.strip():
            continue
        cells = line.split(",")
        rows.append([float(v) for v in cells[:-1]])
        labels.append(names[cells[-1].strip()])
    write_csv("wall_following.csv", rows, labels)


def prepare_landsat():
    # sat.trn + sat.tst merged: 36 attributes, labels {1,2,3,4,5,7} -> 0..5.
    trn, tst = need_raw("sat.trn", "sat.tst")
    table = np.vstack([np.loadtxt(trn), np.loadtxt(tst)])
    remap = {1: 0, 2: 1, 3: 2, 4: 3, 5: 4, 7: 5}
    labels = [remap[int(v)] for v in table[:, -1]]
    write_csv("landsat.csv", table[:, :-1], labels)


def prepare_optdigits():
    # optdigits.tra + optdigits.tes merged: 64 pixel counts, label 0..9 last.
    tra, tes = need_raw("optdigits.tra", "optdigits.tes")
    table = np.vstack(
        [np.loadtxt(tra, delimiter=","), np.loadtxt(tes, delimiter=",")]
    )
    write_csv("optdigits.csv", table[:, :-1], table[:, -1].astype(int))


def prepare_pendigits():
    # pendigits.tra + pendigits.tes merged: 16 coordinates, label 0..9 last.
    tra, tes = need_raw("pendigits.tra", "pendigits.tes")
    table = np.vstack(
        [np.loadtxt(tra, delimiter=","), np.loadtxt(tes, delimiter=",")]
    )
    write_csv("pendigits.csv", table[:, :-1], table[:, -1].astype(int))


RECIPES = {
    "breast-cancer": prepare_breast_cancer,
    "waveform": prepare_waveform,
    "german": prepare_german,
    "australian": prepare_australian,
    "spambase": prepare_spambase,
    "hill-valley": prepare_hill_valley,
    "movie-review": prepare_movie_review,
    "abalone": prepare_abalone,
    "wall-following": prepare_wall_following,
    "landsat": prepare_landsat,
    "optdigits": prepare_optdigits,
    "pendigits": prepare_pendigits,
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "names",
        nargs="*",
        help=f"datasets to prepare (default: all of {', '.join(RECIPES)})",
    )
    args = parser.parse_args()
    names = args.names or list(RECIPES)
    unknown = [n for n in names if n not in RECIPES]
    if unknown:
        parser.error(f"unknown dataset(s): {', '.join(unknown)}")
    DATA.mkdir(parents=True, exist_ok=True)
    failures = 0
    for name in names:
        try:
            RECIPES[name]()
        except FileNotFoundError as err:
            print(f"SKIP {name}: {err}")
        except Exception as err:  # conversion bug or malformed raw file
            print(f"FAIL {name}: {err}")
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
