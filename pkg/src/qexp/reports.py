"""Run reports: named residual maps with grid metadata, JSON/CSV output.

JSON output is canonical (sorted keys, fixed separators) so identical run
configurations produce byte-identical reports.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__


@dataclass
class ResidualReport:
    """Named residual magnitudes plus the metadata needed to reproduce them."""

    meta: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.meta.setdefault("version", __version__)

    def add(self, name: str, value: float, threshold: Optional[float] = None) -> None:
        self.residuals[name] = float(value)
        if threshold is not None:
            self.thresholds[name] = float(threshold)

    def merge(self, other: "ResidualReport", prefix: str = "") -> None:
        for k, v in other.residuals.items():
            self.residuals[prefix + k] = v
        for k, v in other.thresholds.items():
            self.thresholds[prefix + k] = v

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values()) if self.residuals else 0.0

    @property
    def passed(self) -> bool:
        return all(
            self.residuals[name] <= bound
            for name, bound in self.thresholds.items()
            if name in self.residuals
        )

    def violations(self) -> dict:
        return {
            name: (self.residuals[name], bound)
            for name, bound in self.thresholds.items()
            if name in self.residuals and self.residuals[name] > bound
        }

    def to_json(self) -> str:
        payload = {
            "meta": self.meta,
            "residuals": self.residuals,
            "thresholds": self.thresholds,
            "passed": self.passed,
        }
        return json.dumps(payload, sort_keys=True, indent=2, separators=(",", ": "))

    def write_json(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["name", "residual", "threshold"])
            for name in sorted(self.residuals):
                writer.writerow(
                    [name, repr(self.residuals[name]), repr(self.thresholds.get(name, ""))]
                )

    @classmethod
    def from_json(cls, text: str) -> "ResidualReport":
        payload = json.loads(text)
        return cls(
            meta=payload.get("meta", {}),
            residuals=payload.get("residuals", {}),
            thresholds=payload.get("thresholds", {}),
        )


def write_sweep_csv(path, rows: list[dict], columns: Optional[list[str]] = None) -> None:
    """Tabular CSV for parameter sweeps (one row per sweep point)."""
    if not rows:
        raise ValueError("no sweep rows to write")
    if columns is None:
        columns = sorted({k for row in rows for k in row})
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in columns})
