"""Executable checkers, one per inequality, each returning a :class:`CheckReport`."""

from hermineq.theorems.builders import BUILDERS, build, replay
from hermineq.theorems.compressions import (
    PmapTrajectory,
    check_davis,
    check_thm1_1,
    check_thm1_2,
    study_pmap,
)
from hermineq.theorems.contractions import (
    check_cor2_3,
    check_prop2_5,
    check_statement5,
    check_thm2_2_column,
    check_thm2_2_contraction,
    repro_example_2_4,
)
from hermineq.theorems.expansive import (
    check_lemma3_4,
    check_lemma3_7,
    check_prop3_2,
    check_prop3_8,
    check_prop3_10,
    check_prop3_11,
    check_prop4_1,
    check_remark3_1,
    check_star_section3,
    check_thm3_5,
    check_thm3_9,
    repro_example_3_3,
    repro_example_3_6,
)
from hermineq.theorems.falsify import FALSIFIABLE, FalsifyResult, falsify
from hermineq.theorems.questions import check_question2_6, check_question3_12
from hermineq.theorems.report import STATEMENT_IDS, CheckReport

__all__ = [
    "BUILDERS",
    "build",
    "replay",
    "PmapTrajectory",
    "check_davis",
    "check_thm1_1",
    "check_thm1_2",
    "study_pmap",
    "check_cor2_3",
    "check_prop2_5",
    "check_statement5",
    "check_thm2_2_column",
    "check_thm2_2_contraction",
    "repro_example_2_4",
    "check_lemma3_4",
    "check_lemma3_7",
    "check_prop3_2",
    "check_prop3_8",
    "check_prop3_10",
    "check_prop3_11",
    "check_prop4_1",
    "check_remark3_1",
    "check_star_section3",
    "check_thm3_5",
    "check_thm3_9",
    "repro_example_3_3",
    "repro_example_3_6",
    "FALSIFIABLE",
    "FalsifyResult",
    "check_question2_6",
    "check_question3_12",
    "STATEMENT_IDS",
    "CheckReport",
    "falsify",
]
