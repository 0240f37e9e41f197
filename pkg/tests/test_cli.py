import csv
import json
import math
import subprocess
import sys

import pytest

from hermineq.cli import EXIT_GENERICITY, EXIT_OK, EXIT_SCHEMA, EXIT_VERDICT, main, parse_grid
from hermineq.errors import SchemaError
from hermineq.numerics import matrix_to_json


def _scenario(tmp_path, jobs, name="scenario.json", version="1"):
    path = tmp_path / name
    path.write_text(json.dumps({"version": version, "jobs": jobs}))
    return path


def _verify(tmp_path, scenario, *extra):
    out = tmp_path / "report.json"
    code = main(["verify", "--scenario", str(scenario), "--out", str(out), *extra])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def _stable(obj):
    obj = dict(obj)
    obj.pop("generated_at", None)
    return json.dumps(obj, sort_keys=True)


class TestVerify:
    def test_named_examples(self, tmp_path):
        jobs = [{"statement_id": s} for s in ("ex2_4", "ex3_3", "ex3_6")]
        code, report = _verify(tmp_path, _scenario(tmp_path, jobs))
        assert code == EXIT_OK
        margins = {r["statement_id"]: r["margins"] for r in report["reports"]}
        assert margins["ex2_4"]["abs_sum_eig_1"] == pytest.approx(math.sqrt(2), abs=1e-9)
        assert margins["ex3_3"]["lambda2_f_zaz"] == pytest.approx(0.728, abs=5e-4)
        assert margins["ex3_3"]["lambda2_z_fa_z"] == pytest.approx(0.767, abs=5e-4)
        assert margins["ex3_6"]["trace_f_zaz"] == pytest.approx(3.0, abs=1e-9)
        assert margins["ex3_6"]["trace_z_fa_z"] == pytest.approx(5.0, abs=1e-9)
        assert set(report["summary"]) == {"ex2_4", "ex3_3", "ex3_6"}

    def test_empty_jobs(self, tmp_path):
        code, report = _verify(tmp_path, _scenario(tmp_path, []))
        assert code == EXIT_OK
        assert report["reports"] == [] and report["summary"] == {}

    def test_seeded_property_job(self, tmp_path):
        jobs = [{"statement_id": "thm1_1", "instance": {"generator": {"seed": 7, "dim": 4}}, "trials": 100}]
        code, report = _verify(tmp_path, _scenario(tmp_path, jobs))
        assert code == EXIT_OK
        job = report["jobs"][0]
        assert job["pass"] == 100 and job["fail"] == 0
        assert job["worst_margin"] is not None

    def test_inline_instance(self, tmp_path):
        inline = {
            "A": {"matrix": matrix_to_json([[1.0, 1.0], [1.0, 1.0]])},
            "B": {"matrix": matrix_to_json([[0.0, 0.0], [0.0, -2.0]])},
        }
        jobs = [{"statement_id": "statement5", "instance": {"inline": inline}, "expect": "fail"}]
        code, report = _verify(tmp_path, _scenario(tmp_path, jobs))
        assert code == EXIT_OK
        assert report["reports"][0]["holds"] is False

    def test_unexpected_verdict(self, tmp_path):
        jobs = [{"statement_id": "ex2_4", "expect": "hold"}]
        code, _ = _verify(tmp_path, _scenario(tmp_path, jobs))
        assert code == EXIT_VERDICT

    def test_byte_stable(self, tmp_path):
        jobs = [
            {"statement_id": "prop4_1", "instance": {"generator": {"seed": 3, "dim": 3}}, "trials": 5},
            {"statement_id": "ex3_3"},
        ]
        scenario = _scenario(tmp_path, jobs)
        _, first = _verify(tmp_path, scenario)
        _, second = _verify(tmp_path, scenario)
        assert _stable(first) == _stable(second)

    def test_canonical_order(self, tmp_path):
        jobs = [{"statement_id": "thm3_9", "trials": 3}, {"statement_id": "ex2_4"}]
        _, report = _verify(tmp_path, _scenario(tmp_path, jobs))
        keys = [(r["statement_id"], r["instance_hash"]) for r in report["reports"]]
        assert keys == sorted(keys)


class TestVerifyMalformed:
    @pytest.mark.parametrize(
        "payload",
        [
            "not json",
            json.dumps({"jobs": []}),
            json.dumps({"version": "1", "jobs": [{"trials": 2}]}),
            json.dumps({"version": "1", "jobs": [{"statement_id": "thm1_1", "trials": 0}]}),
            json.dumps({"version": "1", "jobs": [{"statement_id": "thm1_1", "colour": "red"}]}),
            json.dumps({"version": "1", "jobs": [{"statement_id": "thm1_1", "instance": {"generator": {"dim": 3}}}]}),
            json.dumps({"version": "1", "jobs": [{"statement_id": "thm1_1", "tolerance": -1}]}),
            json.dumps({"version": "1", "jobs": [{"statement_id": "thm1_1", "expect": "maybe"}]}),
            json.dumps({"version": "1", "jobs": [{"statement_id": "thm9_9"}]}),
            json.dumps({"version": "1", "jobs": [{"statement_id": "ex2_4", "instance": {"inline": {"A": {"matrix": {"rows": 2}}}}}]}),
        ],
    )
    def test_schema_errors(self, tmp_path, payload):
        path = tmp_path / "bad.json"
        path.write_text(payload)
        code, report = _verify(tmp_path, path)
        assert code == EXIT_SCHEMA and report is None

    def test_missing_file(self, tmp_path):
        code, _ = _verify(tmp_path, tmp_path / "absent.json")
        assert code == EXIT_SCHEMA


class TestPmap:
    def _instance(self, tmp_path, s):
        path = tmp_path / "inst.json"
        path.write_text(json.dumps({"A": [[2, 0], [0, 1]], "S": s}))
        return path

    def _rows(self, path):
        with open(path) as fh:
            return list(csv.reader(fh))

    def test_closed_form_rows(self, tmp_path):
        out = tmp_path / "traj.csv"
        code = main(["pmap", "--instance", str(self._instance(tmp_path, [[1], [1]])), "--grid", "1,2", "--out", str(out)])
        assert code == EXIT_OK
        rows = self._rows(out)
        assert rows[0] == ["p", "lambda_1"]
        assert float(rows[1][0]) == 1.0 and float(rows[1][1]) == pytest.approx(1.5, abs=1e-12)
        assert float(rows[2][0]) == 2.0 and float(rows[2][1]) == pytest.approx(math.sqrt(2.5), abs=1e-12)
        sidecar = json.loads(out.with_suffix(".json").read_text())
        assert sidecar["csv"] == "traj.csv"

    def test_top_eigenvector_constant(self, tmp_path):
        out = tmp_path / "traj.csv"
        code = main(["pmap", "--instance", str(self._instance(tmp_path, [[1], [0]])), "--grid", "1,4,16", "--out", str(out)])
        assert code == EXIT_OK
        values = [float(r[1]) for r in self._rows(out)[1:]]
        assert values == pytest.approx([2.0, 2.0, 2.0], abs=1e-12)

    def test_genericity_exit(self, tmp_path):
        out = tmp_path / "traj.csv"
        code = main(["pmap", "--instance", str(self._instance(tmp_path, [[0], [1]])), "--out", str(out)])
        assert code == EXIT_GENERICITY

    def test_random_instance_flags(self, tmp_path):
        out = tmp_path / "traj.csv"
        assert main(["pmap", "--seed", "4", "--dim", "5", "--d", "2", "--out", str(out)]) == EXIT_OK
        rows = self._rows(out)
        assert rows[0] == ["p", "lambda_1", "lambda_2"] and len(rows) == 9
        sidecar = json.loads(out.with_suffix(".json").read_text())
        assert sidecar["genericity_ok"] and sidecar["monotone_ok"] and sidecar["loewner_ok"]

    def test_bad_grid(self, tmp_path):
        code = main(["pmap", "--grid", "2,1", "--out", str(tmp_path / "x.csv")])
        assert code == EXIT_SCHEMA

    def test_parse_grid(self):
        assert parse_grid("1,2,4") == (1.0, 2.0, 4.0)
        assert parse_grid(None)[-1] == 128.0
        with pytest.raises(SchemaError):
            parse_grid("0,1")


class TestFalsify:
    def _run(self, tmp_path, *args):
        out = tmp_path / "f.json"
        code = main(["falsify", *args, "--out", str(out)])
        return code, (json.loads(out.read_text()) if out.exists() else None)

    def test_star_canned_first(self, tmp_path):
        code, rec = self._run(tmp_path, "star_section3", "--seed", "1", "--trials", "5")
        assert code == EXIT_OK
        assert rec["found"] and rec["trials_run"] == 1 and rec["status"] == "counterexample"
        assert rec["counterexample"]["margins"]["min_eig_margin"] == pytest.approx(-0.039, abs=5e-4)

    def test_single_unitary(self, tmp_path):
        code, rec = self._run(tmp_path, "statement5", "--trials", "1")
        assert code == EXIT_OK and rec["found"]

    def test_open_question_record(self, tmp_path):
        code, rec = self._run(tmp_path, "question2_6", "--seed", "2", "--trials", "100")
        assert code == EXIT_OK
        assert rec["status"] in ("inconclusive", "counterexample")
        if rec["status"] == "inconclusive":
            assert rec["trials_run"] == 100 and rec["counterexample"] is None

    def test_deterministic(self, tmp_path):
        _, a = self._run(tmp_path, "question3_12", "--seed", "5", "--trials", "20")
        _, b = self._run(tmp_path, "question3_12", "--seed", "5", "--trials", "20")
        assert _stable(a) == _stable(b)

    def test_unknown(self, tmp_path):
        code, rec = self._run(tmp_path, "thm1_1")
        assert code == EXIT_SCHEMA and rec is None


class TestRepro:
    def test_table(self, tmp_path, capsys):
        out = tmp_path / "repro.json"
        assert main(["repro", "--out", str(out)]) == EXIT_OK
        text = capsys.readouterr().out
        assert "1.41421356237" in text and "0.585786437627" in text
        rows = json.loads(out.read_text())["rows"]
        assert all(r["ok"] for r in rows)


class TestModuleEntryPoint:
    def test_python_dash_m(self, tmp_path):
        scenario = _scenario(tmp_path, [{"statement_id": "ex3_6"}])
        proc = subprocess.run(
            [sys.executable, "-m", "hermineq", "verify", "--scenario", str(scenario), "--out", "-"],
            capture_output=True, text=True, check=False,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["summary"]["ex3_6"]["fail"] == 1

    def test_missing_subcommand(self):
        with pytest.raises(SystemExit):
            main([])
