"""Report records for empirically fitted inequality constants.

The analytical statements being certified assert that some constant exists;
the harness measures the best constant over a finite sweep and checks that
it is finite, has the right sign, and is stable under grid refinement
(fitted constants for a genuine inequality change by at most a factor ~2
when resolutions double).
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Any

__all__ = ["BoundFitReport", "stability_ratio", "write_report_rows", "read_report_rows"]


@dataclass
class BoundFitReport:
    """Outcome of fitting one inequality over a parameter sweep.

    fitted_constant is the smallest C (or largest c, depending on the
    inequality's direction) that makes the inequality hold at every sampled
    point.  refinement_stability is the ratio of fitted constants between a
    fine and a coarse sweep when both were run; None otherwise.
    """

    inequality_id: str
    fitted_constant: float
    sweep_description: str
    passed: bool
    refinement_stability: float | None = None
    witness: dict[str, Any] | None = None
    extras: dict[str, Any] = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def row(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["verdict"] = self.verdict
        return d


def stability_ratio(coarse: float, fine: float) -> float:
    """Ratio fine/coarse, inf-safe; equal infinities count as perfectly stable."""
    if coarse == fine:
        return 1.0
    if coarse == 0.0 or not (abs(coarse) < float("inf")):
        return float("inf")
    return fine / coarse


def write_report_rows(path, reports) -> None:
    rows = [r.row() for r in reports]
    with open(path, "w") as fh:
        json.dump(rows, fh, indent=2, default=float)
        fh.write("\n")


def read_report_rows(path) -> list[dict[str, Any]]:
    with open(path) as fh:
        return json.load(fh)
