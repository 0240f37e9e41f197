"""Counterexample search: the named counterexamples first, then seeded random instances."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from hermineq.errors import UnknownStatement
from hermineq.instances import GenConfig
from hermineq.numerics import DEFAULT_TOL, Tolerance
from hermineq.scalarfn import Power
from hermineq.theorems import contractions as con
from hermineq.theorems import expansive as exp
from hermineq.theorems.builders import build
from hermineq.theorems.report import CheckReport

KNOWN_FALSE = ("star_section3", "statement5", "remark3_1")
OPEN_QUESTIONS = ("question2_6", "question3_12")
FALSIFIABLE = KNOWN_FALSE + OPEN_QUESTIONS


def _canned_star(tol):
    f, a, z = exp.example_3_3()
    return exp.check_star_section3(f, a, z, tol)


def _canned_statement5(tol):
    return con.check_statement5(*con.example_2_4(), tol)


def _canned_remark3_1(tol):
    return exp.check_remark3_1(Power(0.5), 0.0, 4.0, tol)


CANNED = {
    "star_section3": _canned_star,
    "statement5": _canned_statement5,
    "remark3_1": _canned_remark3_1,
}


@dataclass
class FalsifyResult:
    """Outcome of a search.

    ``status`` is ``counterexample`` when one was found, ``not_found`` for a
    known-false statement that survived every trial, and ``inconclusive``
    for an open question with no counterexample.
    """

    statement_id: str
    found: bool
    report: Optional[CheckReport]
    trials_run: int
    status: str
    seed: int
    worst_margin: float

    def to_json(self) -> dict:
        return {
            "statement_id": self.statement_id,
            "found": self.found,
            "status": self.status,
            "trials_run": self.trials_run,
            "seed": self.seed,
            "worst_margin": self.worst_margin if math.isfinite(self.worst_margin) else None,
            "counterexample": self.report.to_json() if self.report is not None else None,
        }


def falsify(
    statement_id: str,
    cfg: GenConfig,
    trials: int,
    seed: Optional[int] = None,
    tol: Tolerance = DEFAULT_TOL,
) -> FalsifyResult:
    """Search up to ``trials`` instances for one where ``statement_id`` fails.

    Trial 1 is the named counterexample when there is one; the remaining
    trials are drawn from ``cfg.child(i)`` (with ``cfg.seed`` replaced by
    ``seed`` when given), so the search is deterministic.
    """
    if statement_id not in FALSIFIABLE:
        raise UnknownStatement(f"{statement_id!r} is not in the falsifiable catalog {FALSIFIABLE}")
    if seed is not None:
        cfg = cfg.with_(seed=int(seed))
    worst = math.inf
    run = 0
    canned = CANNED.get(statement_id)
    for i in range(int(trials)):
        if i == 0 and canned is not None:
            report = canned(tol)
        else:
            report = build(statement_id, cfg.child(i), tol, falsifier=True)
        run += 1
        worst = min(worst, report.min_margin)
        if not report.holds:
            return FalsifyResult(statement_id, True, report, run, "counterexample", cfg.seed, worst)
    status = "inconclusive" if statement_id in OPEN_QUESTIONS else "not_found"
    return FalsifyResult(statement_id, False, None, run, status, cfg.seed, worst)
