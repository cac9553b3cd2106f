"""Sweep records and the fixed, versioned CSV schema.

CSV output is deterministic under a fixed config and seed: timestamps live
only in the JSON report, never in the CSV.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional

SWEEP_CSV_VERSION = "atdlab.sweep.v1"

CSV_COLUMNS = [
    "level",
    "delta",
    "regime",
    "eps",
    "d_hausdorff",
    "d_modified",
    "d_boundary",
    "N",
    "abs_C_A",
    "T_eps",
    "relation_lhs",
    "relation_rhs",
    "ladder_stage",
    "ladder_verdict",
    "included_in_fit",
    "seed",
]


@dataclass
class SweepRecord:
    level: int
    delta: float
    regime: str
    eps: float
    d_hausdorff: float
    d_modified: float
    d_boundary: float
    N: int
    abs_C_A: float
    T_eps: float
    relation_lhs: float
    relation_rhs: float
    ladder_stage: Optional[int]
    ladder_verdict: str
    included_in_fit: bool
    seed: int
    timestamps: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def csv_row(self) -> list:
        return [
            self.level,
            f"{self.delta:.17g}",
            self.regime,
            f"{self.eps:.17g}",
            f"{self.d_hausdorff:.17g}",
            f"{self.d_modified:.17g}",
            f"{self.d_boundary:.17g}",
            self.N,
            f"{self.abs_C_A:.17g}",
            f"{self.T_eps:.17g}",
            f"{self.relation_lhs:.17g}",
            f"{self.relation_rhs:.17g}",
            "" if self.ladder_stage is None else self.ladder_stage,
            self.ladder_verdict,
            int(self.included_in_fit),
            self.seed,
        ]

    def as_dict(self) -> dict:
        d = {c: v for c, v in zip(CSV_COLUMNS, self.csv_row())}
        d["timestamps"] = self.timestamps
        d["extras"] = self.extras
        return d


def write_sweep_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# schema: {SWEEP_CSV_VERSION}\n")
        wr = csv.writer(fh)
        wr.writerow(CSV_COLUMNS)
        for r in records:
            wr.writerow(r.csv_row())
