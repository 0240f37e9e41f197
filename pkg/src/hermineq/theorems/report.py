"""CheckReport, instance serialisation and the hypothesis helpers shared by all checkers."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from hermineq.dominance import eigen_dominates, witness_unitary
from hermineq.errors import DomainTooSmall, HypothesisViolated, SchemaError
from hermineq.instances import RNG_ALGORITHM
from hermineq.numerics import (
    DEFAULT_TOL,
    Tolerance,
    as_matrix,
    eigvalsh,
    matrix_from_json,
    matrix_to_json,
)
from hermineq.opcalc import Subspace
from hermineq.scalarfn import Compose, FunctionProfile, ScalarFunction, function_from_json, profile

STATEMENT_IDS = (
    "thm1_1",
    "davis_1",
    "thm1_2",
    "thm2_2_contraction",
    "thm2_2_column",
    "cor2_3_bk",
    "cor2_3_hp",
    "prop2_5",
    "ex2_4",
    "remark3_1",
    "prop3_2",
    "ex3_3",
    "lemma3_4",
    "thm3_5",
    "ex3_6",
    "lemma3_7",
    "prop3_8",
    "thm3_9",
    "prop3_10",
    "prop3_11",
    "prop4_1",
    "star_section3",
    "statement5",
    "question2_6",
    "question3_12",
)


# ---------------------------------------------------------------------------
# instance serialisation


def encode(value: Any) -> Any:
    """JSON form of a checker input (matrices, functions, subspaces, lists, scalars)."""
    if isinstance(value, Subspace):
        return {"subspace": value.to_json()}
    if isinstance(value, ScalarFunction):
        return {"function": value.to_json()}
    if isinstance(value, np.ndarray):
        return {"matrix": matrix_to_json(value)}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    if isinstance(value, dict):
        return {str(k): encode(v) for k, v in value.items()}
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    raise TypeError(f"cannot serialise {type(value).__name__}")


def decode(obj: Any) -> Any:
    """Inverse of :func:`encode`."""
    if isinstance(obj, list):
        return [decode(v) for v in obj]
    if isinstance(obj, dict):
        if set(obj) == {"matrix"}:
            return matrix_from_json(obj["matrix"])
        if set(obj) == {"function"}:
            return function_from_json(obj["function"])
        if set(obj) == {"subspace"}:
            return Subspace.from_json(obj["subspace"])
        return {k: decode(v) for k, v in obj.items()}
    return obj


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def instance_hash(instance: dict) -> str:
    """Short content hash of a serialised instance (used for canonical ordering)."""
    return hashlib.sha256(canonical_json(instance).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# report


@dataclass
class CheckReport:
    """Verdict of one checker run.

    ``holds`` is true exactly when every margin is at least
    ``-tolerance.bound(scale)``; ``details`` carries diagnostics that are not
    margins (flags, failing indices, route agreement, ...).
    """

    statement_id: str
    holds: bool
    margins: dict[str, float]
    witnesses: list[np.ndarray] = field(default_factory=list)
    instance: dict = field(default_factory=dict)
    tolerance: Tolerance = DEFAULT_TOL
    notes: str = ""
    scale: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def min_margin(self) -> float:
        return min(self.margins.values()) if self.margins else 0.0

    @property
    def instance_hash(self) -> str:
        return instance_hash(self.instance)

    def to_json(self) -> dict:
        return {
            "statement_id": self.statement_id,
            "holds": self.holds,
            "margins": {k: float(v) for k, v in self.margins.items()},
            "witnesses": [matrix_to_json(w) for w in self.witnesses],
            "instance": self.instance,
            "instance_hash": self.instance_hash,
            "tolerance": self.tolerance.to_json(),
            "scale": float(self.scale),
            "notes": self.notes,
            "details": _jsonable(self.details),
            "rng": RNG_ALGORITHM,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CheckReport":
        try:
            return cls(
                statement_id=obj["statement_id"],
                holds=bool(obj["holds"]),
                margins={k: float(v) for k, v in obj["margins"].items()},
                witnesses=[matrix_from_json(w) for w in obj.get("witnesses", [])],
                instance=obj.get("instance", {}),
                tolerance=Tolerance.from_json(obj.get("tolerance", {})),
                notes=obj.get("notes", ""),
                scale=float(obj.get("scale", 0.0)),
                details=obj.get("details", {}),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad report object: {exc}") from exc

    def inputs(self) -> dict:
        """Decoded checker inputs."""
        return decode(self.instance)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return matrix_to_json(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def make_report(
    statement_id: str,
    margins: dict[str, float],
    scale: float,
    tol: Tolerance,
    inputs: dict,
    witnesses=(),
    notes: str = "",
    details: Optional[dict] = None,
) -> CheckReport:
    margins = {k: float(v) for k, v in margins.items()}
    holds = all(tol.allows(m, scale) for m in margins.values())
    return CheckReport(
        statement_id=statement_id,
        holds=holds,
        margins=margins,
        witnesses=list(witnesses),
        instance=encode(inputs),
        tolerance=tol,
        notes=notes,
        scale=float(scale),
        details=dict(details or {}),
    )


# ---------------------------------------------------------------------------
# dominance with witness


def dominance_margins(x, y, tol: Tolerance):
    """Eigen-dominance of ``x`` by ``y`` plus the witness certificate when it holds.

    Returns ``(margins, witnesses, scale, details)``; margins are the smallest
    per-index gap and, when dominance holds, the PSD margin of ``UYU* - X``.
    """
    verdict = eigen_dominates(x, y, tol)
    margins = {"min_eig_margin": verdict.min_margin}
    details = {"per_index_margins": verdict.per_index_margins}
    witnesses = []
    if verdict.holds:
        w = witness_unitary(x, y, tol)
        margins["psd_margin"] = w.psd_margin
        witnesses.append(w.witness)
    else:
        details["failing_k"] = verdict.failing_indices
    return margins, witnesses, verdict.scale, details


# ---------------------------------------------------------------------------
# hypotheses


def spectral_interval(*mats) -> tuple[float, float]:
    lo, hi = math.inf, -math.inf
    for m in mats:
        w = eigvalsh(as_matrix(m))
        lo, hi = min(lo, float(w[-1])), max(hi, float(w[0]))
    return lo, hi


def require_domain(f: ScalarFunction, interval, statement_id: str) -> None:
    a, b = interval
    lo, hi = f.domain
    slack = 1e-12 * (1 + max(abs(a), abs(b)))
    if a < lo - slack or b > hi + slack:
        raise DomainTooSmall(f"{statement_id}: domain {f.domain} of f does not cover [{a:.6g}, {b:.6g}]")


def require_shape(f: ScalarFunction, interval, statement_id: str, **wanted) -> FunctionProfile:
    """Profile ``f`` on ``interval`` and insist on each requested flag.

    ``wanted`` keys are :class:`FunctionProfile` attributes (``convex``,
    ``monotone``, ...); ``value_at_zero_le`` / ``value_at_zero_ge`` /
    ``value_at_zero_eq`` constrain ``f(0)``.
    """
    require_domain(f, interval, statement_id)
    lo, hi = f.domain
    a, b = max(interval[0], lo), min(interval[1], hi)
    prof = profile(f, (a, b))
    for key, expected in wanted.items():
        if key.startswith("value_at_zero"):
            z = prof.value_at_zero
            if z is None:
                raise HypothesisViolated(f"{statement_id}: 0 is not in the domain of f")
            ok = {"le": z <= expected + 1e-12, "ge": z >= expected - 1e-12, "eq": abs(z - expected) <= 1e-12}[
                key.rsplit("_", 1)[1]
            ]
        else:
            ok = bool(getattr(prof, key)) == bool(expected)
        if not ok:
            raise HypothesisViolated(
                f"{statement_id}: f fails hypothesis {key}={expected} on [{a:.6g}, {b:.6g}]"
            )
    return prof


def require_monotone_convex(f: ScalarFunction, interval, statement_id: str) -> str:
    """Accept monotone convex ``f`` or a (whitelisted) unitary convex composition."""
    if isinstance(f, Compose):
        require_domain(f, interval, statement_id)
        return "unitary_convex"
    require_shape(f, interval, statement_id, convex=True, monotone=True)
    return "monotone_convex"
