"""Bundled example data."""

from __future__ import annotations

import csv
from importlib import resources

from .estimation import UnitRecord

_ARMS = ("C", "D", "E")


def bradley_counts() -> dict:
    """Outcome counts per taste-test arm, categories 0 (terrible) to 4
    (excellent)."""
    counts = {arm: [0] * 5 for arm in _ARMS}
    path = resources.files("ordbounds").joinpath("data/bradley.csv")
    with path.open() as f:
        for row in csv.DictReader(f):
            counts[row["arm"]][int(row["y"])] += 1
    return counts


def bradley_records(treated: str = "E", control: str = "C") -> list:
    """Two-arm records for a pairwise comparison of the taste-test data."""
    if treated not in _ARMS or control not in _ARMS or treated == control:
        raise ValueError(f"treated/control must be distinct members of {_ARMS}")
    counts = bradley_counts()
    out = []
    for arm, z in ((treated, 1), (control, 0)):
        for y, c in enumerate(counts[arm]):
            out.extend(UnitRecord(z=z, y=y) for _ in range(c))
    return out
