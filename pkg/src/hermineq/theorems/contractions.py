"""Contractions and isometric columns: Jensen-type eigenvalue inequalities.

For a contraction ``Z`` and monotone convex ``f`` with ``f(0) <= 0`` there is
a unitary ``U`` with ``f(Z*AZ) <= U Z*f(A)Z U*``; for an isometric column
``sum Z_i* Z_i = I`` the same holds for ``sum Z_i* A_i Z_i`` without a sign
condition.  Both are cross-checked against the compression form through
explicit dilations.
"""

from __future__ import annotations

import math

import numpy as np

from hermineq.dominance import eigen_dominates, thompson_decompose, witness_unitary
from hermineq.errors import ConstructionFailed, DimensionMismatch, DominanceFails
from hermineq.numerics import (
    DEFAULT_TOL,
    Tolerance,
    as_matrix,
    check_hermitian,
    dagger,
    eigvalsh,
    is_psd,
    singular_values,
)
from hermineq.opcalc import (
    Subspace,
    apply_fn,
    column_dilation,
    compress,
    dilate_contraction,
    matrix_abs,
    require_contraction,
    require_isometric_column,
)
from hermineq.scalarfn import AbsoluteValue, ScalarFunction
from hermineq.theorems.compressions import averaging_embedding, check_thm1_1
from hermineq.theorems.report import (
    CheckReport,
    dominance_margins,
    make_report,
    require_monotone_convex,
    require_shape,
    spectral_interval,
)


def _hull(*intervals) -> tuple[float, float]:
    return min(i[0] for i in intervals), max(i[1] for i in intervals)


def _route_margins(x, y_route, y_target, tol: Tolerance):
    """Dominance of ``x`` by ``y_route``; its witness is then tested against ``y_target``."""
    verdict = eigen_dominates(x, y_route, tol)
    out = {"route_min_eig_margin": verdict.min_margin}
    witness = None
    if verdict.holds:
        witness = witness_unitary(x, y_route, tol).witness
        _, margin = is_psd(witness @ y_target @ dagger(witness) - x, tol)
        out["route_psd_margin"] = margin
    return out, witness


def check_thm2_2_contraction(
    f: ScalarFunction, a, z, tol: Tolerance = DEFAULT_TOL, strict: bool = True
) -> CheckReport:
    """``f(Z*AZ) <= U Z*f(A)Z U*`` for a contraction ``Z`` and monotone convex ``f``, ``f(0) <= 0``.

    Direct route: eigen-dominance of ``X = f(Z*AZ)`` by ``Y = Z*f(A)Z``.
    Dilation route: ``V = [[Z, 0], [D, 0]]`` turns ``Z*AZ`` into a
    compression of ``A (+) 0``; there ``f(X-side) <= W (Y + f(0) D^2) W*`` and
    ``f(0) D^2 <= 0`` carries the witness ``W`` over to ``Y``.  Both verdicts
    are reported and must agree.
    """
    a = check_hermitian(a, tol)
    z = require_contraction(z)
    zaz = dagger(z) @ a @ z
    notes = ""
    if strict:
        interval = _hull(spectral_interval(a, zaz), (0.0, 0.0))
        notes = f"hypothesis: {require_monotone_convex(f, interval, 'thm2_2_contraction')}"
        require_shape(f, (0.0, 0.0), "thm2_2_contraction", value_at_zero_le=0.0)
    x = apply_fn(f, zaz, tol)
    y = dagger(z) @ apply_fn(f, a, tol) @ z
    margins, witnesses, scale, details = dominance_margins(x, y, tol)

    v, at = dilate_contraction(z, a, tol)
    n = z.shape[0]
    s = Subspace(v[:, :n])
    y_dil = compress(apply_fn(f, at, tol), s)
    x_dil = apply_fn(f, compress(at, s), tol)
    route, _ = _route_margins(x_dil, y_dil, y, tol)
    margins.update(route)
    direct_holds = all(tol.allows(m, scale) for k, m in margins.items() if not k.startswith("route"))
    route_holds = all(tol.allows(m, scale) for k, m in route.items())
    details["direct_holds"] = direct_holds
    details["dilation_holds"] = route_holds
    details["routes_agree"] = direct_holds == route_holds
    inputs = {"f": f, "A": a, "Z": z}
    return make_report("thm2_2_contraction", margins, scale, tol, inputs, witnesses, notes, details)


def _column_sum(z_list, a_list):
    return sum(dagger(zi) @ ai @ zi for zi, ai in zip(z_list, a_list))


def check_thm2_2_column(
    f: ScalarFunction, a_list, z_list, tol: Tolerance = DEFAULT_TOL, strict: bool = True
) -> CheckReport:
    """``f(sum Z_i* A_i Z_i) <= U (sum Z_i* f(A_i) Z_i) U*`` for an isometric column.

    Also run through the stacked isometry ``[Z_1; ...; Z_m]`` and
    ``diag(A_1, ..., A_m)`` (compression form); the two verdicts must agree.
    """
    a_list = [check_hermitian(a, tol) for a in a_list]
    z_list = require_isometric_column(z_list)
    if len(a_list) != len(z_list):
        raise DimensionMismatch("need one A_i per Z_i")
    inner = _column_sum(z_list, a_list)
    notes = ""
    if strict:
        interval = spectral_interval(inner, *a_list)
        notes = f"hypothesis: {require_monotone_convex(f, interval, 'thm2_2_column')}"
    x = apply_fn(f, inner, tol)
    y = _column_sum(z_list, [apply_fn(f, ai, tol) for ai in a_list])
    margins, witnesses, scale, details = dominance_margins(x, y, tol)

    s, big = column_dilation(z_list, a_list)
    route, _ = _route_margins(apply_fn(f, compress(big, s), tol), compress(apply_fn(f, big, tol), s), y, tol)
    margins.update(route)
    direct_holds = all(tol.allows(m, scale) for k, m in margins.items() if not k.startswith("route"))
    route_holds = all(tol.allows(m, scale) for m in route.values())
    details.update(direct_holds=direct_holds, dilation_holds=route_holds, routes_agree=direct_holds == route_holds)
    inputs = {"f": f, "A_list": a_list, "Z_list": z_list}
    return make_report("thm2_2_column", margins, scale, tol, inputs, witnesses, notes, details)


def _trace(x) -> float:
    return float(np.trace(as_matrix(x)).real)


def check_cor2_3(
    f: ScalarFunction, a_or_list, z_or_list, variant: str = "bk", tol: Tolerance = DEFAULT_TOL,
    strict: bool = True,
) -> CheckReport:
    """Trace forms: ``Tr f(Z*AZ) <= Tr Z*f(A)Z`` (``bk``) and its isometric-column version (``hp``).

    Only convexity is needed (no monotonicity); ``bk`` also needs ``f(0) <= 0``.
    """
    if variant == "bk":
        a_list = [check_hermitian(a_or_list, tol)]
        z_list = [require_contraction(z_or_list)]
    elif variant == "hp":
        a_list = [check_hermitian(a, tol) for a in a_or_list]
        z_list = require_isometric_column(z_or_list)
    else:
        raise ValueError(f"variant must be 'bk' or 'hp', got {variant!r}")
    sid = f"cor2_3_{variant}"
    inner = _column_sum(z_list, a_list)
    if strict:
        interval = spectral_interval(inner, *a_list)
        if variant == "bk":
            interval = _hull(interval, (0.0, 0.0))
            require_shape(f, interval, sid, convex=True, value_at_zero_le=0.0)
        else:
            require_shape(f, interval, sid, convex=True)
    lhs = _trace(apply_fn(f, inner, tol))
    rhs = _trace(_column_sum(z_list, [apply_fn(f, ai, tol) for ai in a_list]))
    inputs = {"f": f, "A_list": a_list, "Z_list": z_list, "variant": variant}
    details = {"trace_lhs": lhs, "trace_rhs": rhs}
    return make_report(sid, {"trace_margin": rhs - lhs}, max(abs(lhs), abs(rhs)), tol, inputs, details=details)


def check_prop2_5(f: ScalarFunction, a, b, tol: Tolerance = DEFAULT_TOL, strict: bool = True) -> CheckReport:
    """``f((A+B)/2) <= (U f(A) U* + V f(B) V*)/2`` for even convex ``f``, built constructively.

    1. Thompson: ``|A+B| <= M = U0|A|U0* + V0|B|V0*``.
    2. ``f`` even, so ``f((A+B)/2) = f(|A+B|/2)``; ``f`` is nondecreasing on
       ``[0, inf)``, so ``f(|A+B|/2)`` is eigen-dominated by ``f(M/2)``: witness ``W1``.
    3. ``M/2`` is an average of ``U0|A|U0*`` and ``V0|B|V0*``: the isometric
       column inequality gives ``U1``, and ``f(|X|) = f(X)``.
    Final unitaries ``U = W1 U1 U0`` and ``V = W1 U1 V0``.
    """
    a = check_hermitian(a, tol)
    b = check_hermitian(b, tol)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    mid = (a + b) / 2
    radius = max(float(np.max(np.abs(eigvalsh(m)))) for m in (a, b, a + b))
    if strict:
        require_shape(f, (-radius, radius), "prop2_5", convex=True, even=True)
    x = apply_fn(f, mid, tol)
    fa, fb = apply_fn(f, a, tol), apply_fn(f, b, tol)

    u0, v0, thompson_margin = thompson_decompose(a, b, tol)
    abs_a, abs_b = matrix_abs(a, tol), matrix_abs(b, tol)
    pa, pb = u0 @ abs_a @ dagger(u0), v0 @ abs_b @ dagger(v0)
    half_m = (pa + pb) / 2
    try:
        w1 = witness_unitary(apply_fn(f, matrix_abs(a + b, tol) / 2, tol), apply_fn(f, half_m, tol), tol)
        root = np.eye(a.shape[0]) / math.sqrt(2)
        col = check_thm2_2_column(f, [pa, pb], [root, root], tol, strict=False)
    except DominanceFails as exc:
        raise ConstructionFailed(f"prop2_5 step 2 failed: {exc}") from exc
    if not col.witnesses:
        raise ConstructionFailed("prop2_5 step 3 (isometric column) produced no witness")
    u1 = col.witnesses[0]
    u = w1.witness @ u1 @ u0
    v = w1.witness @ u1 @ v0
    rhs = (u @ fa @ dagger(u) + v @ fb @ dagger(v)) / 2
    _, final = is_psd(rhs - x, tol)
    scale = max(float(singular_values(rhs)[0]), float(singular_values(x)[0]))
    margins = {
        "thompson_psd_margin": thompson_margin,
        "step2_psd_margin": float(w1.psd_margin),
        "step3_psd_margin": col.margins.get("psd_margin", col.min_margin),
        "final_psd_margin": final,
    }
    return make_report("prop2_5", margins, scale, tol, {"f": f, "A": a, "B": b}, [u, v])


# ---------------------------------------------------------------------------
# Example: the single-unitary triangle inequality for |.| fails

EXAMPLE_2_4_A = np.array([[1.0, 1.0], [1.0, 1.0]], dtype=np.complex128)
EXAMPLE_2_4_B = np.array([[0.0, 0.0], [0.0, -2.0]], dtype=np.complex128)


def example_2_4() -> tuple[np.ndarray, np.ndarray]:
    """``A = [[1,1],[1,1]]``, ``B = diag(0,-2)``: ``|A+B| = sqrt(2) I`` but ``|A|+|B|`` has eigenvalue ``2-sqrt(2)``."""
    return EXAMPLE_2_4_A.copy(), EXAMPLE_2_4_B.copy()


def check_statement5(a, b, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """Single-unitary triangle inequality ``|A+B| <= U(|A|+|B|)U*`` (false in general)."""
    a, b = check_hermitian(a, tol), check_hermitian(b, tol)
    x = matrix_abs(a + b, tol)
    y = matrix_abs(a, tol) + matrix_abs(b, tol)
    margins, witnesses, scale, details = dominance_margins(x, y, tol)
    return make_report("statement5", margins, scale, tol, {"A": a, "B": b}, witnesses, details=details)


def repro_example_2_4(tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """Reproduce the counterexample to the single-unitary triangle inequality.

    Margins carry the reproduced values (``|A+B|`` eigenvalues ``sqrt(2)``,
    the offending eigenvalue ``2 - sqrt(2)`` of ``|A|+|B|``) and the
    dominance margin, which is negative, so ``holds`` is false.
    """
    a, b = example_2_4()
    s = eigvalsh(matrix_abs(a + b, tol))
    t = eigvalsh(matrix_abs(a, tol) + matrix_abs(b, tol))
    verdict = eigen_dominates(matrix_abs(a + b, tol), matrix_abs(a, tol) + matrix_abs(b, tol), tol)
    margins = {
        "abs_sum_eig_1": float(s[0]),
        "abs_sum_eig_2": float(s[1]),
        "offending_eig": float(t[-1]),
        "statement5_min_eig_margin": verdict.min_margin,
    }
    details = {
        "expected": {"abs_sum_eig": math.sqrt(2), "offending_eig": 2 - math.sqrt(2)},
        "abs_a_plus_abs_b_eigenvalues": [float(w) for w in t],
        "failing_k": verdict.failing_indices,
    }
    notes = "|A+B| <= U(|A|+|B|)U* fails: no single unitary exists"
    return make_report("ex2_4", margins, verdict.scale, tol, {"A": a, "B": b}, notes=notes, details=details)


def thm1_1_absolute_value_embedding(tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """The compression inequality with ``f = |t|`` on the counterexample pair.

    ``diag(A, B)`` compressed to ``span([I; I]/sqrt 2)`` is ``(A+B)/2``; ``|t|`` is
    convex but not monotone, and dominance fails.
    """
    big, s = averaging_embedding(example_2_4())
    return check_thm1_1(AbsoluteValue(), big, s, tol, strict=False)
