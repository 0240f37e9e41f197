"""Batch runs of seeded instances and their order-independent summaries."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from hermineq.instances import GenConfig
from hermineq.numerics import DEFAULT_TOL, Tolerance
from hermineq.theorems.builders import build
from hermineq.theorems.report import CheckReport


@dataclass
class SuiteResult:
    statement_id: str
    reports: list[CheckReport]
    seconds: float = 0.0
    errors: list[dict] = field(default_factory=list)

    @property
    def failures(self) -> list[CheckReport]:
        return [r for r in self.reports if not r.holds]

    @property
    def worst_margin(self) -> float:
        return min((r.min_margin for r in self.reports), default=math.nan)


def sort_reports(reports) -> list[CheckReport]:
    """Canonical order: statement id, then instance hash."""
    return sorted(reports, key=lambda r: (r.statement_id, r.instance_hash))


def run_suite(
    statement_id: str, cfg: GenConfig, trials: int, tol: Tolerance = DEFAULT_TOL
) -> SuiteResult:
    """Run ``trials`` instances drawn from ``cfg.child(0..trials-1)``.

    Hypothesis or construction errors are recorded per instance rather than
    aborting the batch.
    """
    from hermineq.errors import LabError

    start = time.perf_counter()
    reports, errors = [], []
    for i in range(int(trials)):
        child = cfg.child(i)
        try:
            reports.append(build(statement_id, child, tol))
        except LabError as exc:
            errors.append({"trial": i, "seed": child.seed, "error": type(exc).__name__, "message": str(exc)})
    return SuiteResult(statement_id, sort_reports(reports), time.perf_counter() - start, errors)


def summarize(reports) -> dict:
    """``{statement_id: {pass, fail, worst_margin}}``."""
    out: dict[str, dict] = {}
    for r in reports:
        entry = out.setdefault(r.statement_id, {"pass": 0, "fail": 0, "worst_margin": math.inf})
        entry["pass" if r.holds else "fail"] += 1
        entry["worst_margin"] = min(entry["worst_margin"], r.min_margin)
    for entry in out.values():
        if not math.isfinite(entry["worst_margin"]):
            entry["worst_margin"] = None
    return dict(sorted(out.items()))
