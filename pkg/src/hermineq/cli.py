"""Command-line front end: ``verify``, ``pmap``, ``falsify`` and ``repro``.

Exit codes: 0 success, 1 unexpected verdict, 2 malformed input or unknown
statement, 3 genericity failure in the power-mean study.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

import jsonschema
import numpy as np

from hermineq.errors import GenericityFailed, LabError, SchemaError, UnknownStatement
from hermineq.instances import RNG_ALGORITHM, GenConfig, gen_psd, gen_subspace
from hermineq.numerics import DEFAULT_TOL, Tolerance, as_matrix
from hermineq.opcalc import Subspace
from hermineq.suites import run_suite, sort_reports, summarize
from hermineq.theorems.builders import replay
from hermineq.theorems.compressions import DEFAULT_P_GRID, study_pmap
from hermineq.theorems.contractions import repro_example_2_4, thm1_1_absolute_value_embedding
from hermineq.theorems.expansive import (
    EXAMPLE_3_3_CLOSED_FORMS,
    EXAMPLE_3_3_PRINTED,
    repro_example_3_3,
    repro_example_3_6,
)
from hermineq.theorems.falsify import FALSIFIABLE, OPEN_QUESTIONS, falsify
from hermineq.theorems.report import STATEMENT_IDS, decode

EXIT_OK, EXIT_VERDICT, EXIT_SCHEMA, EXIT_GENERICITY = 0, 1, 2, 3
REPORT_SCHEMA_VERSION = 1

# statements whose named instance must fail, and those for which any verdict is acceptable
EXPECT_FAIL = ("ex2_4", "ex3_3", "ex3_6")
EXPECT_ANY = ("star_section3", "statement5") + OPEN_QUESTIONS

_TOLERANCE_SCHEMA = {
    "oneOf": [
        {"type": "number", "minimum": 0},
        {
            "type": "object",
            "properties": {"absolute": {"type": "number", "minimum": 0}, "relative": {"type": "number", "minimum": 0}},
            "additionalProperties": False,
        },
    ]
}

SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["version", "jobs"],
    "additionalProperties": False,
    "properties": {
        "version": {"type": "string"},
        "jobs": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["statement_id"],
                "additionalProperties": False,
                "properties": {
                    "statement_id": {"type": "string"},
                    "instance": {
                        "oneOf": [
                            {
                                "type": "object",
                                "required": ["generator"],
                                "additionalProperties": False,
                                "properties": {
                                    "generator": {
                                        "type": "object",
                                        "required": ["seed"],
                                        "properties": {
                                            "seed": {"type": "integer", "minimum": 0},
                                            "dim": {"type": "integer", "minimum": 1, "maximum": 12},
                                            "class": {"type": "string"},
                                            "extra": {"type": "object"},
                                            "rng": {"const": RNG_ALGORITHM},
                                        },
                                        "additionalProperties": False,
                                    }
                                },
                            },
                            {
                                "type": "object",
                                "required": ["inline"],
                                "additionalProperties": False,
                                "properties": {"inline": {"type": "object"}},
                            },
                        ]
                    },
                    "trials": {"type": "integer", "minimum": 1},
                    "tolerance": _TOLERANCE_SCHEMA,
                    "expect": {"enum": ["hold", "fail", "any"]},
                },
            },
        },
    },
}


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _write_json(path, obj) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _tolerance(value, fallback: Tolerance) -> Tolerance:
    return fallback if value is None else Tolerance.from_json(value)


def default_dim(statement_id: str) -> int:
    return 5 if statement_id == "thm1_2" else 6


def expected_verdict(statement_id: str) -> str:
    if statement_id in EXPECT_FAIL:
        return "fail"
    if statement_id in EXPECT_ANY:
        return "any"
    return "hold"


# ---------------------------------------------------------------------------
# scenarios


def load_scenario(path) -> dict:
    """Parse and validate a scenario; inline instances are decoded eagerly.

    Raises :class:`SchemaError` (missing file, bad JSON, schema violation,
    malformed matrix) or :class:`UnknownStatement`.
    """
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read scenario {path}: {exc}") from exc
    try:
        jsonschema.validate(raw, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"scenario does not validate: {exc.message}") from exc
    for job in raw["jobs"]:
        if job["statement_id"] not in STATEMENT_IDS:
            raise UnknownStatement(job["statement_id"])
        inline = job.get("instance", {}).get("inline")
        if inline is not None:
            try:
                job["_inputs"] = decode(inline)
            except (LabError, KeyError, TypeError, ValueError) as exc:
                raise SchemaError(f"bad inline instance for {job['statement_id']}: {exc}") from exc
    return raw


def run_job(job: dict, seed: int, trials: int | None, tol: Tolerance) -> tuple[list, dict]:
    """Run one scenario job; returns ``(reports, job_record)``."""
    sid = job["statement_id"]
    tol = _tolerance(job.get("tolerance"), tol)
    expect = job.get("expect", expected_verdict(sid))
    errors: list[dict] = []
    if "_inputs" in job:
        reports = [replay(sid, job["_inputs"], tol)]
    else:
        gen = job.get("instance", {}).get("generator", {})
        cfg = GenConfig(
            int(gen.get("seed", seed)), int(gen.get("dim", default_dim(sid))), gen.get("class", "mixed"),
            dict(gen.get("extra", {})),
        )
        count = int(job.get("trials", trials or 1))
        result = run_suite(sid, cfg, count, tol)
        reports, errors = result.reports, result.errors
    verdicts = [r.holds for r in reports]
    if expect == "hold":
        ok = all(verdicts) and not errors
    elif expect == "fail":
        ok = not any(verdicts) and not errors
    else:
        ok = not errors
    record = {
        "statement_id": sid,
        "expect": expect,
        "ok": ok,
        "pass": sum(verdicts),
        "fail": len(verdicts) - sum(verdicts),
        "worst_margin": min((r.min_margin for r in reports), default=None),
        "errors": errors,
    }
    return reports, record


def cmd_verify(args) -> int:
    tol = _tolerance(args.tolerance, DEFAULT_TOL)
    try:
        scenario = load_scenario(args.scenario)
    except (SchemaError, UnknownStatement) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    all_reports, jobs = [], []
    try:
        for job in scenario["jobs"]:
            reports, record = run_job(job, args.seed, args.trials, tol)
            all_reports.extend(reports)
            jobs.append(record)
    except GenericityFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GENERICITY
    except LabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VERDICT
    ordered = sort_reports(all_reports)
    out = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "generated_at": _now(),
        "rng": RNG_ALGORITHM,
        "scenario_version": scenario["version"],
        "jobs": jobs,
        "summary": summarize(ordered),
        "reports": [r.to_json() for r in ordered],
    }
    _write_json(args.out, out)
    bad = [j for j in jobs if not j["ok"]]
    for j in bad:
        print(f"unexpected verdict: {j['statement_id']} expected {j['expect']}, "
              f"pass={j['pass']} fail={j['fail']} errors={len(j['errors'])}", file=sys.stderr)
    return EXIT_VERDICT if bad else EXIT_OK


# ---------------------------------------------------------------------------
# p-map


def parse_grid(text: str | None) -> tuple[float, ...]:
    """Comma-separated exponents, ascending, e.g. ``1,2,4``."""
    if not text:
        return DEFAULT_P_GRID
    try:
        grid = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise SchemaError(f"bad grid {text!r}") from exc
    if not grid or any(p <= 0 or not math.isfinite(p) for p in grid) or list(grid) != sorted(set(grid)):
        raise SchemaError(f"grid must be strictly ascending positive numbers, got {text!r}")
    return grid


def _parse_matrix(obj) -> np.ndarray:
    if isinstance(obj, dict):
        return decode(obj if set(obj) == {"matrix"} else {"matrix": obj})
    return as_matrix(np.asarray(obj, dtype=complex))


def load_pmap_instance(path) -> tuple[np.ndarray, Subspace]:
    """``{"A": matrix, "S": spanning columns}``; plain nested lists or encoded matrices."""
    try:
        raw = json.loads(Path(path).read_text())
        a = _parse_matrix(raw["A"])
        s = raw["S"]
        if isinstance(s, dict) and "subspace" in s:
            return a, decode(s)
        return a, Subspace.span(_parse_matrix(s))
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"cannot read p-map instance {path}: {exc}") from exc


def cmd_pmap(args) -> int:
    try:
        grid = parse_grid(args.grid)
        if args.instance:
            a, s = load_pmap_instance(args.instance)
            source = {"instance_file": str(args.instance)}
        else:
            cfg = GenConfig(args.seed, args.dim, "psd")
            a, s = gen_psd(cfg), gen_subspace(cfg.with_(cls="subspace"), args.d)
            source = {"generator": cfg.to_json(), "d": args.d}
        traj = study_pmap(a, s, grid)
    except GenericityFailed as exc:
        print(f"genericity failed: {exc}", file=sys.stderr)
        return EXIT_GENERICITY
    except LabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    d = s.dim
    out = Path(args.out)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p"] + [f"lambda_{k}" for k in range(1, d + 1)])
        for row in traj.csv_rows():
            w.writerow([repr(float(x)) for x in row])
    sidecar = {"schema_version": REPORT_SCHEMA_VERSION, "generated_at": _now(), "rng": RNG_ALGORITHM,
               "source": source, "csv": out.name, **traj.to_json()}
    _write_json(out.with_suffix(".json"), sidecar)
    ok = traj.monotone_ok and traj.loewner_ok
    if not ok:
        print("monotonicity or Loewner check failed", file=sys.stderr)
    return EXIT_OK if ok else EXIT_VERDICT


# ---------------------------------------------------------------------------
# falsify


def cmd_falsify(args) -> int:
    tol = _tolerance(args.tolerance, DEFAULT_TOL)
    cfg = GenConfig(args.seed, args.dim, "mixed")
    try:
        result = falsify(args.statement_id, cfg, args.trials, tol=tol)
    except UnknownStatement as exc:
        print(f"error: unknown statement {exc}; falsifiable: {', '.join(FALSIFIABLE)}", file=sys.stderr)
        return EXIT_SCHEMA
    out = {"schema_version": REPORT_SCHEMA_VERSION, "generated_at": _now(), "rng": RNG_ALGORITHM,
           "generator": cfg.to_json(), **result.to_json()}
    _write_json(args.out, out)
    print(f"{result.statement_id}: {result.status} after {result.trials_run} trial(s)", file=sys.stderr)
    return EXIT_VERDICT if result.status == "not_found" else EXIT_OK


# ---------------------------------------------------------------------------
# repro


def repro_rows(tol: Tolerance = DEFAULT_TOL) -> tuple[list[dict], list]:
    """Reference-value table for the three worked counterexamples."""
    r24, r33, r36 = repro_example_2_4(tol), repro_example_3_3(tol), repro_example_3_6(tol)
    embed = thm1_1_absolute_value_embedding(tol)
    rows = [
        ("ex2_4", "eigenvalue 1 of |A+B|", math.sqrt(2), r24.margins["abs_sum_eig_1"], 1e-9),
        ("ex2_4", "eigenvalue 2 of |A+B|", math.sqrt(2), r24.margins["abs_sum_eig_2"], 1e-9),
        ("ex2_4", "smallest eigenvalue of |A|+|B|", 2 - math.sqrt(2), r24.margins["offending_eig"], 1e-9),
        ("ex3_3", "lambda_2 f(ZAZ), closed form", EXAMPLE_3_3_CLOSED_FORMS[0], r33.margins["lambda2_f_zaz"], 1e-9),
        ("ex3_3", "lambda_2 Zf(A)Z, closed form", EXAMPLE_3_3_CLOSED_FORMS[1], r33.margins["lambda2_z_fa_z"], 1e-9),
        ("ex3_3", "lambda_2 f(ZAZ), printed", EXAMPLE_3_3_PRINTED[0], r33.margins["lambda2_f_zaz"], 5e-4),
        ("ex3_3", "lambda_2 Zf(A)Z, printed", EXAMPLE_3_3_PRINTED[1], r33.margins["lambda2_z_fa_z"], 5e-4),
        ("ex3_6", "Tr f(Z*AZ)", 3.0, r36.margins["trace_f_zaz"], 1e-9),
        ("ex3_6", "Tr Z*f(A)Z", 5.0, r36.margins["trace_z_fa_z"], 1e-9),
    ]
    table = [
        {"statement_id": sid, "quantity": q, "reference": ref, "computed": val,
         "abs_error": abs(val - ref), "tolerance": t, "ok": abs(val - ref) <= t}
        for sid, q, ref, val, t in rows
    ]
    for rep in (r24, r33, r36, embed):
        table.append({"statement_id": rep.statement_id, "quantity": "statement fails on this instance",
                      "reference": "fails", "computed": "fails" if not rep.holds else "holds",
                      "abs_error": None, "tolerance": None, "ok": not rep.holds})
    return table, [r24, r33, r36, embed]


def cmd_repro(args) -> int:
    tol = _tolerance(args.tolerance, DEFAULT_TOL)
    table, reports = repro_rows(tol)
    print(f"{'id':6s}  {'quantity':34s}  {'reference':>20s}  {'computed':>20s}  ok")
    for row in table:
        ref, val = row["reference"], row["computed"]
        ref_s = f"{ref:.12g}" if isinstance(ref, float) else str(ref)
        val_s = f"{val:.12g}" if isinstance(val, float) else str(val)
        print(f"{row['statement_id']:6s}  {row['quantity']:34s}  {ref_s:>20s}  {val_s:>20s}  {'yes' if row['ok'] else 'NO'}")
    if args.out:
        _write_json(args.out, {"schema_version": REPORT_SCHEMA_VERSION, "generated_at": _now(),
                               "rows": table, "reports": [r.to_json() for r in sort_reports(reports)]})
    return EXIT_OK if all(r["ok"] for r in table) else EXIT_VERDICT


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hermineq", description="Executable matrix Jensen-type inequalities.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the jobs of a scenario file")
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--out", default="-", help="report JSON path (default: stdout)")
    p.add_argument("--seed", type=int, default=0, help="seed for jobs without a generator seed")
    p.add_argument("--trials", type=int, default=None, help="trials for jobs that do not set them")
    p.add_argument("--tolerance", type=float, default=None, help="absolute and relative tolerance")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("pmap", help="trace p -> ((A^p)_E)^(1/p) on a grid")
    p.add_argument("--instance", help='JSON file {"A": ..., "S": ...}; otherwise a seeded random instance')
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int, default=5)
    p.add_argument("--d", type=int, default=2, help="subspace dimension for random instances")
    p.add_argument("--grid", default=None, help="comma-separated ascending exponents (default 1,2,4,...,128)")
    p.add_argument("--out", required=True, help="CSV path; the JSON sidecar goes next to it")
    p.set_defaults(func=cmd_pmap)

    p = sub.add_parser("falsify", help="search for a counterexample")
    p.add_argument("statement_id", help=f"one of {', '.join(FALSIFIABLE)}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--dim", type=int, default=4, help="largest matrix dimension drawn")
    p.add_argument("--tolerance", type=float, default=None)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_falsify)

    p = sub.add_parser("repro", help="reproduce the worked counterexamples")
    p.add_argument("--out", default=None)
    p.add_argument("--tolerance", type=float, default=None)
    p.set_defaults(func=cmd_repro)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
