import math

import pytest

from hermineq.instances import GenConfig
from hermineq.suites import run_suite, sort_reports, summarize
from hermineq.theorems import build


class TestRunSuite:
    def test_counts_and_order(self):
        res = run_suite("thm1_1", GenConfig(3, 4), 25)
        assert len(res.reports) + len(res.errors) == 25
        keys = [(r.statement_id, r.instance_hash) for r in res.reports]
        assert keys == sorted(keys)
        assert not res.failures
        assert res.seconds >= 0

    def test_deterministic(self):
        a = run_suite("prop4_1", GenConfig(5, 3), 10)
        b = run_suite("prop4_1", GenConfig(5, 3), 10)
        assert [r.to_json() for r in a.reports] == [r.to_json() for r in b.reports]

    def test_known_false_statement_collects_failures(self):
        res = run_suite("ex3_3", GenConfig(1, 2), 1)
        assert len(res.failures) == 1
        assert res.worst_margin == pytest.approx(-0.039, abs=5e-4)

    def test_empty(self):
        res = run_suite("thm1_1", GenConfig(1, 2), 0)
        assert res.reports == [] and math.isnan(res.worst_margin)


class TestSummarize:
    def test_order_independent(self):
        reports = [build(sid, GenConfig(i, 3)) for i in range(3) for sid in ("thm3_9", "ex2_4", "thm1_1")]
        a = summarize(reports)
        b = summarize(list(reversed(reports)))
        assert a == b
        assert list(a) == sorted(a)
        assert a["ex2_4"] == {"pass": 0, "fail": 3, "worst_margin": pytest.approx(2 - 2 * math.sqrt(2))}
        assert a["thm1_1"]["pass"] == 3

    def test_sort_reports(self):
        reports = [build("thm1_1", GenConfig(i, 3)) for i in range(5)]
        assert sort_reports(reports) == sort_reports(list(reversed(reports)))

    def test_empty(self):
        assert summarize([]) == {}
