"""Extraction report: everything one anchor produces, JSON/CSV serializable."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .ladder import LadderResult
from .schedule import RelationVerdict

__all__ = ["AtdReport"]


def _c2l(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


@dataclass
class AtdReport:
    regime: str
    anchor_world: list
    h: float
    opening_angle: float
    N: int
    C_A: complex
    ladder: Optional[LadderResult] = None
    relation: Optional[RelationVerdict] = None
    tau_window: Optional[list] = None
    fit_residual: float = 0.0
    term_audit: Optional[dict] = None
    tau_sweep: Optional[list] = None  # [(tau, re F, im F), ...]
    extras: dict = field(default_factory=dict)

    def to_json(self, path) -> None:
        doc = {
            "regime": self.regime,
            "anchor_world": list(np.asarray(self.anchor_world, dtype=float)),
            "h": self.h,
            "opening_angle": self.opening_angle,
            "N": self.N,
            "C_A": _c2l(self.C_A),
            "fit_residual": self.fit_residual,
            "tau_window": self.tau_window,
            "ladder": self.ladder.as_dict() if self.ladder else None,
            "relation": self.relation.as_dict() if self.relation else None,
            "term_audit": _audit_jsonable(self.term_audit),
            "extras": self.extras,
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2)

    def tau_sweep_to_csv(self, path) -> None:
        if not self.tau_sweep:
            raise ValueError("report carries no tau sweep")
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["tau", "re_F", "im_F"])
            for tau, v in self.tau_sweep:
                v = complex(v)
                wr.writerow([f"{tau:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}"])


def _audit_jsonable(audit):
    if audit is None:
        return None
    out = {"residual": audit["residual"], "N": audit["N"]}
    out["lhs"] = _c2l(audit["lhs"])
    out["terms"] = {k: _c2l(v) for k, v in audit["terms"].items()}
    out["magnitudes"] = audit["magnitudes"]
    out["predicted"] = audit["predicted"]
    return out
