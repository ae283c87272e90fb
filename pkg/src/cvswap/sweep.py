"""Fidelity-versus-squeezing tables for the comparison scenarios."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from .criteria import db_to_r
from .protocol import Scenario, run_scenario

COLUMNS = (
    "scenario",
    "db",
    "r",
    "g_swap",
    "fidelity_engine",
    "fidelity_closed_form",
    "duan_sum",
    "tan_product",
)


@dataclass
class SweepSpec:
    scenarios: Sequence[str] = ("a", "b", "c", "d", "e")
    db_min: float = 0.0
    db_max: float = 10.0
    db_step: float = 0.5
    overrides: Dict[str, float] = field(default_factory=dict)
    fmt: str = "csv"
    out: Optional[str] = None

    def __post_init__(self):
        if not self.scenarios:
            raise ValueError("at least one scenario is required")
        self.scenarios = [Scenario.parse(s).value for s in self.scenarios]
        if self.db_min < 0:
            raise ValueError("db_min must be >= 0")
        if self.db_min > self.db_max:
            raise ValueError("db_min must not exceed db_max")
        if not self.db_step > 0:
            raise ValueError("db_step must be > 0")
        if self.fmt not in ("csv", "json"):
            raise ValueError(f"unknown format {self.fmt!r}")

    def db_grid(self) -> List[float]:
        n = int(math.floor((self.db_max - self.db_min) / self.db_step + 1e-9))
        # multiply rather than accumulate so grid values are reproducible
        return [round(self.db_min + i * self.db_step, 12) for i in range(n + 1)]


def sweep_rows(spec: SweepSpec) -> List[dict]:
    rows = []
    for tag in spec.scenarios:
        for db in spec.db_grid():
            r = db_to_r(db)
            rep = run_scenario(tag, r, spec.overrides)
            rows.append(
                {
                    "scenario": tag,
                    "db": db,
                    "r": r,
                    "g_swap": rep.g_swap,
                    "fidelity_engine": rep.fidelity,
                    "fidelity_closed_form": rep.fidelity_closed_form,
                    "duan_sum": rep.duan_sum,
                    "tan_product": rep.tan_product,
                }
            )
    return rows


def render(rows: List[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in rows:
        w.writerow(["" if row[c] is None else row[c] for c in COLUMNS])
    return buf.getvalue()
