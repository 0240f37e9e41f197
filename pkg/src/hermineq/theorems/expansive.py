"""Expansive operators (``Z*Z >= I``): reversed Jensen-type inequalities.

Per-eigenvalue statements fail in general here, but trace, Ky Fan,
operator-norm and determinant versions survive under suitable
shape hypotheses on ``f``.  Every checker works on ``X = Z*f(A)Z`` and
``f(Z*AZ)`` with ``A`` PSD.
"""

from __future__ import annotations

import math

import numpy as np

from hermineq.dominance import ky_fan_dominates
from hermineq.errors import HypothesisViolated, LabError, NotAdmissible
from hermineq.numerics import (
    DEFAULT_TOL,
    Tolerance,
    as_matrix,
    check_hermitian,
    dagger,
    eig_hermitian,
    eigvalsh,
    is_psd,
    opnorm,
)
from hermineq.opcalc import (
    apply_fn,
    positive_part_shift,
    rank,
    require_expansive,
    require_psd,
    support_projection,
)
from hermineq.scalarfn import (
    Pwl,
    PositivePartShift,
    ScalarFunction,
    inverse_monotone,
    profile,
    psi_admissible,
    psi_transform,
)
from hermineq.theorems.report import (
    CheckReport,
    dominance_margins,
    make_report,
    require_shape,
)


def _trace(x) -> float:
    return float(np.trace(as_matrix(x)).real)


def _setup(a, z, tol: Tolerance, strict: bool = True):
    """Validate ``A`` (PSD when strict) and expansive ``Z``; return ``(A, Z, Z*AZ, b)``."""
    a = require_psd(a, tol) if strict else check_hermitian(a, tol)
    z = require_expansive(z)
    zaz = dagger(z) @ a @ z
    zaz = (zaz + dagger(zaz)) / 2
    b = float(np.max(np.abs(eigvalsh(zaz))))
    return a, z, zaz, b


def _sides(f, a, z, zaz, tol):
    """``(f(Z*AZ), Z*f(A)Z)``."""
    lhs = apply_fn(f, zaz, tol)
    rhs = dagger(z) @ apply_fn(f, a, tol) @ z
    return lhs, (rhs + dagger(rhs)) / 2


# ---------------------------------------------------------------------------
# trace test that forces convexity


def remark3_1_instance(x: float, y: float) -> tuple[np.ndarray, np.ndarray]:
    """``A = diag(x, y)`` and the contraction ``Z = [[1/sqrt2, 0], [1/sqrt2, 0]]``."""
    a = np.diag([float(x), float(y)]).astype(np.complex128)
    r = 1 / math.sqrt(2)
    z = np.array([[r, 0.0], [r, 0.0]], dtype=np.complex128)
    return a, z


def check_remark3_1(f: ScalarFunction, x: float, y: float, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """``Tr f(Z*AZ) <= Tr Z*f(A)Z`` on the 2x2 instance, i.e. ``f((x+y)/2) <= (f(x)+f(y))/2``.

    A negative margin is a strict trace violation, which certifies that
    ``f`` is not midpoint convex at ``(x, y)``.
    """
    if x < 0 or y < 0:
        raise HypothesisViolated("remark3_1: x and y must be nonnegative")
    require_shape(f, (0.0, max(x, y)), "remark3_1", value_at_zero_eq=0.0, nonnegative=True)
    a, z = remark3_1_instance(x, y)
    zaz = dagger(z) @ a @ z
    lhs = _trace(apply_fn(f, zaz, tol))
    rhs = _trace(dagger(z) @ apply_fn(f, a, tol) @ z)
    details = {"trace_lhs": lhs, "trace_rhs": rhs, "midpoint": (x + y) / 2}
    return make_report(
        "remark3_1", {"trace_margin": rhs - lhs}, max(abs(lhs), abs(rhs)), tol,
        {"f": f, "x": float(x), "y": float(y)}, details=details,
    )


def remark3_1_search(f: ScalarFunction, grid, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """Scan all pairs of grid points; return the report with the smallest margin."""
    pts = sorted(float(t) for t in grid)
    worst = None
    for i, x in enumerate(pts):
        for y in pts[i + 1 :]:
            rep = check_remark3_1(f, x, y, tol)
            if worst is None or rep.min_margin < worst.min_margin:
                worst = rep
    if worst is None:
        raise ValueError("grid needs at least two points")
    return worst


# ---------------------------------------------------------------------------
# reversed eigenvalue inequality


def _psi_window(a, zaz) -> float:
    """Right end of the interval on which the convexity of ``1/f(1/t)`` is tested."""
    tops = [10.0]
    for m in (a, zaz):
        w = eigvalsh(m)
        pos = w[w > 1e-12]
        if pos.size:
            tops.append(min(2.0 / float(pos.min()), 1e6))
    return max(tops)


def check_prop3_2(f: ScalarFunction, a, z, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """``Z*f(A)Z <= U f(Z*AZ) U*`` when ``1/f(1/t)`` is convex.

    ``f`` must be an increasing bijection of ``[0, inf)`` fixing 0.  When the
    transform is not convex the inequality is still evaluated (falsifier
    mode) and ``details["psi_convex"]`` is false.
    """
    if not psi_admissible(f):
        raise NotAdmissible(f"prop3_2: {f!r} is not an increasing bijection of [0, inf) with f(0) = 0")
    a, z, zaz, _ = _setup(a, z, tol)
    g = psi_transform(f)
    window = _psi_window(a, zaz)
    psi_convex = profile(g, (0.0, window), grid_points=201).convex
    lhs, rhs = _sides(f, a, z, zaz, tol)
    margins, witnesses, scale, details = dominance_margins(rhs, lhs, tol)
    details["psi_convex"] = psi_convex
    details["psi_window"] = window
    notes = "" if psi_convex else "falsifier mode: 1/f(1/t) is not convex, failure is possible"
    return make_report("prop3_2", margins, scale, tol, {"f": f, "A": a, "Z": z}, witnesses, notes, details)


def check_star_section3(
    f: ScalarFunction, a, z, tol: Tolerance = DEFAULT_TOL, strict: bool = True
) -> CheckReport:
    """The tempting statement ``Z*f(A)Z <= U f(Z*AZ) U*`` for convex ``f``, ``f(0) <= 0``.

    It is false in general; this checker measures it on one instance.
    """
    a, z, zaz, b = _setup(a, z, tol, strict)
    if strict:
        lo = min(0.0, float(eigvalsh(a)[-1]), float(eigvalsh(zaz)[-1]))
        require_shape(f, (lo, b), "star_section3", convex=True, value_at_zero_le=0.0)
    lhs, rhs = _sides(f, a, z, zaz, tol)
    margins, witnesses, scale, details = dominance_margins(rhs, lhs, tol)
    return make_report("star_section3", margins, scale, tol, {"f": f, "A": a, "Z": z}, witnesses, details=details)


EXAMPLE_3_3_F = Pwl(1.0, ((1.0, 1.0),))
EXAMPLE_3_3_A = np.diag([1.5, 0.5]).astype(np.complex128)
EXAMPLE_3_3_Z = np.array([[2.0, 1.0], [1.0, 2.0]], dtype=np.complex128)
EXAMPLE_3_3_CLOSED_FORMS = ((10 - math.sqrt(73)) / 2, (12.5 - math.sqrt(120.25)) / 2)
EXAMPLE_3_3_PRINTED = (0.728, 0.767)


def example_3_3():
    """``f(t) = t + (t-1)_+``, ``A = diag(3/2, 1/2)``, ``Z = [[2,1],[1,2]]``."""
    return EXAMPLE_3_3_F, EXAMPLE_3_3_A.copy(), EXAMPLE_3_3_Z.copy()


def repro_example_3_3(tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """Second eigenvalues ``lambda_2(f(ZAZ)) < lambda_2(Zf(A)Z)``: the reversed statement fails."""
    f, a, z = example_3_3()
    rep = check_star_section3(f, a, z, tol)
    zaz = dagger(z) @ a @ z
    lam_f = float(eigvalsh(apply_fn(f, zaz, tol))[1])
    lam_z = float(eigvalsh(dagger(z) @ apply_fn(f, a, tol) @ z)[1])
    margins = {
        "lambda2_f_zaz": lam_f,
        "lambda2_z_fa_z": lam_z,
        "star_min_eig_margin": rep.margins["min_eig_margin"],
    }
    details = {
        "closed_forms": list(EXAMPLE_3_3_CLOSED_FORMS),
        "printed_prefixes": list(EXAMPLE_3_3_PRINTED),
        "closed_form_errors": [abs(lam_f - EXAMPLE_3_3_CLOSED_FORMS[0]), abs(lam_z - EXAMPLE_3_3_CLOSED_FORMS[1])],
        "failing_k": rep.details.get("failing_k", []),
    }
    notes = "Z*f(A)Z <= U f(Z*AZ) U* fails for this convex f with f(0) = 0"
    return make_report("ex3_3", margins, rep.scale, tol, {"f": f, "A": a, "Z": z}, notes=notes, details=details)


# ---------------------------------------------------------------------------
# positive parts and traces


def check_lemma3_4(a, z, beta: float, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """``Z*(A - beta)_+ Z <= U (Z*AZ - beta)_+ U*`` for PSD ``A``, expansive ``Z``, ``beta >= 0``.

    Details record the support-projection facts used in the argument:
    with ``P`` the spectral projection of ``A`` above ``beta`` and
    ``A_beta = AP``, ``supp Z*PZ = supp Z*A_beta Z`` and the nonzero
    spectrum of ``Z*PZ`` lies in ``[1, inf)``.
    """
    if beta < 0:
        raise HypothesisViolated("lemma3_4: beta must be nonnegative")
    a, z, zaz, _ = _setup(a, z, tol)
    x = dagger(z) @ positive_part_shift(a, beta, tol) @ z
    y = positive_part_shift(zaz, beta, tol)
    margins, witnesses, scale, details = dominance_margins((x + dagger(x)) / 2, y, tol)

    w, v = eig_hermitian(a, tol)
    above = w > beta + tol.bound(abs(beta))
    p = v[:, above] @ dagger(v[:, above])
    zpz = dagger(z) @ p @ z
    zabz = dagger(z) @ (a @ p) @ z
    q_zpz = support_projection((zpz + dagger(zpz)) / 2, tol)
    q_zab = support_projection((zabz + dagger(zabz)) / 2, tol)
    wp = eigvalsh((zpz + dagger(zpz)) / 2)
    nonzero = wp[wp > tol.absolute * (1 + abs(float(wp[0])))]
    details.update(
        rank_supp_z_abeta_z=rank((zabz + dagger(zabz)) / 2, tol),
        supports_equal=bool(np.linalg.norm(q_zpz - q_zab) <= 1e-6),
        min_nonzero_eig_zpz=float(nonzero.min()) if nonzero.size else None,
    )
    return make_report("lemma3_4", margins, scale, tol, {"A": a, "Z": z, "beta": float(beta)}, witnesses, details=details)


def check_thm3_5(
    f: ScalarFunction, a, z, variant: str = "convex", tol: Tolerance = DEFAULT_TOL, strict: bool = True
) -> CheckReport:
    """Trace inequality for expansive ``Z`` and PSD ``A``.

    ``concave`` (``f(0) >= 0``): ``Tr f(Z*AZ) <= Tr Z*f(A)Z``;
    ``convex`` (``f(0) <= 0``): ``Tr f(Z*AZ) >= Tr Z*f(A)Z``.
    ``f`` must be defined on ``[0, b]`` with ``b = ||Z*AZ||``.
    """
    if variant not in ("concave", "convex"):
        raise ValueError(f"variant must be 'concave' or 'convex', got {variant!r}")
    a, z, zaz, b = _setup(a, z, tol, strict)
    if strict:
        if variant == "concave":
            require_shape(f, (0.0, b), "thm3_5", concave=True, value_at_zero_ge=0.0)
        else:
            require_shape(f, (0.0, b), "thm3_5", convex=True, value_at_zero_le=0.0)
    lhs_m, rhs_m = _sides(f, a, z, zaz, tol)
    lhs, rhs = _trace(lhs_m), _trace(rhs_m)
    margin = rhs - lhs if variant == "concave" else lhs - rhs
    details = {"trace_f_zaz": lhs, "trace_z_fa_z": rhs, "b": b}
    return make_report(
        "thm3_5", {"trace_margin": margin}, max(abs(lhs), abs(rhs)), tol,
        {"f": f, "A": a, "Z": z, "variant": variant}, details=details,
    )


EXAMPLE_3_6_A = np.diag([1.0, -1.0]).astype(np.complex128)


def repro_example_3_6(tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """``f(t) = t_+`` with indefinite ``A = diag(1, -1)``: ``Tr f(Z*AZ) = 3 < 5 = Tr Z*f(A)Z``.

    The convex trace inequality fails once ``A`` is not PSD.
    """
    f = PositivePartShift(0.0)
    rep = check_thm3_5(f, EXAMPLE_3_6_A, EXAMPLE_3_3_Z, "convex", tol, strict=False)
    margins = {
        "trace_f_zaz": rep.details["trace_f_zaz"],
        "trace_z_fa_z": rep.details["trace_z_fa_z"],
        "convex_trace_margin": rep.margins["trace_margin"],
    }
    details = {"expected": {"trace_f_zaz": 3.0, "trace_z_fa_z": 5.0}}
    notes = "the convex trace inequality needs A >= 0"
    inputs = {"f": f, "A": EXAMPLE_3_6_A.copy(), "Z": EXAMPLE_3_3_Z.copy()}
    return make_report("ex3_6", margins, rep.scale, tol, inputs, notes=notes, details=details)


# ---------------------------------------------------------------------------
# unitarily invariant norms


def check_lemma3_7(z, f_list, u_list, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """``||sum U_i A_i U_i*|| <= ||sum A_i||`` in every Ky Fan norm for ``A_i = f_i(Z)``."""
    z = require_psd(z, tol)
    if len(f_list) != len(u_list) or not f_list:
        raise HypothesisViolated("lemma3_7: need one unitary per function, at least one")
    w = eigvalsh(z)
    interval = (float(w[-1]), float(w[0]))
    for f in f_list:
        require_shape(f, interval, "lemma3_7", nondecreasing=True, nonnegative=True)
    a_list = [apply_fn(f, z, tol) for f in f_list]
    lhs = sum(as_matrix(u) @ ai @ dagger(as_matrix(u)) for u, ai in zip(u_list, a_list))
    rhs = sum(a_list)
    verdict = ky_fan_dominates(lhs, rhs, tol)
    details = {"ky_fan_margins": verdict.margins}
    inputs = {"Z": z, "f_list": list(f_list), "U_list": [as_matrix(u) for u in u_list]}
    return make_report("lemma3_7", {"ky_fan_min_margin": verdict.min_margin}, verdict.scale, tol, inputs, details=details)


def check_prop3_8(f: ScalarFunction, a, z, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """``||Z*f(A)Z||_(k) <= ||f(Z*AZ)||_(k)`` for all ``k`` (nonnegative convex ``f``, ``f(0) = 0``)."""
    a, z, zaz, b = _setup(a, z, tol)
    require_shape(f, (0.0, b), "prop3_8", convex=True, nonnegative=True, value_at_zero_eq=0.0)
    lhs, rhs = _sides(f, a, z, zaz, tol)
    verdict = ky_fan_dominates(rhs, lhs, tol)
    details = {
        "ky_fan_margins": verdict.margins,
        "trace_margin": _trace(lhs) - _trace(rhs),
    }
    return make_report(
        "prop3_8", {"ky_fan_min_margin": verdict.min_margin}, verdict.scale, tol,
        {"f": f, "A": a, "Z": z}, details=details,
    )


def check_thm3_9(f: ScalarFunction, a, z, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """``||f(Z*AZ)||_inf <= ||Z*f(A)Z||_inf`` for nondecreasing concave nonnegative ``f``.

    When ``f(0) = 0`` and ``f`` is invertible, details also record the
    inverse-function route: with ``g = f^{-1}`` (convex, ``g(0) = 0``) and
    ``B = f(A)``, ``||g(Z*BZ)|| >= ||Z*g(B)Z|| = ||Z*AZ||``.
    """
    a, z, zaz, b = _setup(a, z, tol)
    prof = require_shape(f, (0.0, b), "thm3_9", concave=True, nondecreasing=True, nonnegative=True)
    lhs, rhs = _sides(f, a, z, zaz, tol)
    nl, nr = opnorm(lhs), opnorm(rhs)
    details = {"norm_f_zaz": nl, "norm_z_fa_z": nr}
    notes = ""
    if prof.value_at_zero is not None and abs(prof.value_at_zero) <= 1e-12:
        try:
            g = inverse_monotone(f, (0.0, math.inf))
            bmat = apply_fn(f, a, tol)
            zbz = dagger(z) @ bmat @ z
            details["inverse_route_margin"] = opnorm(apply_fn(g, (zbz + dagger(zbz)) / 2, tol)) - opnorm(
                dagger(z) @ apply_fn(g, bmat, tol) @ z
            )
            notes = "inverse-function route evaluated with g = f^{-1}"
        except LabError as exc:
            notes = f"inverse-function route skipped: {exc}"
    return make_report(
        "thm3_9", {"norm_margin": nr - nl}, max(nl, nr), tol, {"f": f, "A": a, "Z": z}, notes=notes, details=details
    )


# ---------------------------------------------------------------------------
# determinants


def _det_hermitian(x) -> float:
    return float(np.prod(eigvalsh(x)))


def check_prop3_10(
    f: ScalarFunction, a, z, variant: str = "concave", tol: Tolerance = DEFAULT_TOL
) -> CheckReport:
    """Determinants: ``det f(Z*AZ) <= det Z*f(A)Z`` (concave nondecreasing nonnegative ``f``)
    and the reverse for convex increasing ``f`` with ``f(0) = 0``.

    Determinants are products of eigenvalues.
    """
    if variant not in ("concave", "convex"):
        raise ValueError(f"variant must be 'concave' or 'convex', got {variant!r}")
    a, z, zaz, b = _setup(a, z, tol)
    if variant == "concave":
        require_shape(f, (0.0, b), "prop3_10", concave=True, nondecreasing=True, nonnegative=True)
    else:
        require_shape(
            f, (0.0, b), "prop3_10", convex=True, nondecreasing=True, nonnegative=True, value_at_zero_eq=0.0
        )
    lhs, rhs = _sides(f, a, z, zaz, tol)
    dl, dr = _det_hermitian(lhs), _det_hermitian(rhs)
    margin = dr - dl if variant == "concave" else dl - dr
    return make_report(
        "prop3_10", {"det_margin": margin}, max(abs(dl), abs(dr)), tol,
        {"f": f, "A": a, "Z": z, "variant": variant}, details={"det_f_zaz": dl, "det_z_fa_z": dr},
    )


# ---------------------------------------------------------------------------
# operator convexity is preserved by 1/f(1/t)


def check_prop3_11(f: ScalarFunction, a, b, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """Midpoint operator convexity of ``f`` and of ``1/f(1/t)`` on one PSD pair.

    Margins are ``lambda_min((h(A)+h(B))/2 - h((A+B)/2))`` for both functions;
    they are nonnegative together when ``f`` is operator convex.
    """
    if not psi_admissible(f):
        raise NotAdmissible(f"prop3_11: {f!r} is not an increasing bijection of [0, inf) with f(0) = 0")
    a, b = require_psd(a, tol), require_psd(b, tol)
    g = psi_transform(f)
    margins = {}
    scale = 0.0
    for name, h in (("f_midpoint", f), ("psi_midpoint", g)):
        mid = apply_fn(h, (a + b) / 2, tol)
        avg = (apply_fn(h, a, tol) + apply_fn(h, b, tol)) / 2
        _, margins[name] = is_psd(avg - mid, tol)
        scale = max(scale, float(np.max(np.abs(eigvalsh(avg)))))
    return make_report("prop3_11", margins, scale, tol, {"f": f, "A": a, "B": b})


# ---------------------------------------------------------------------------
# trace superadditivity


def rotfeld_vector_margins(a, b, alpha: float, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Per-eigenvector margins ``<e,(A+B-alpha)_+ e> - <e,(A-alpha)_+ e> - <e,(B-alpha)_+ e>``.

    ``e`` runs over an eigenbasis of ``A + B``; the margins sum to the trace
    margin for ``f = (t - alpha)_+``.
    """
    e = eig_hermitian(a + b, tol).eigenvectors
    parts = [positive_part_shift(m, alpha, tol) for m in (a + b, a, b)]
    diag = [np.real(np.einsum("ij,ik,kj->j", e.conj(), p, e)) for p in parts]
    return diag[0] - diag[1] - diag[2]


def check_prop4_1(f: ScalarFunction, a, b, variant: str = "convex", tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """``Tr f(A+B) >= Tr f(A) + Tr f(B)`` (convex nonnegative ``f``, ``f(0) <= 0``)
    and the reverse for concave nonnegative ``f``; ``A``, ``B`` PSD.
    """
    if variant not in ("concave", "convex"):
        raise ValueError(f"variant must be 'concave' or 'convex', got {variant!r}")
    a, b = require_psd(a, tol), require_psd(b, tol)
    top = float(eigvalsh(a + b)[0])
    if variant == "convex":
        require_shape(f, (0.0, top), "prop4_1", convex=True, nonnegative=True, value_at_zero_le=0.0)
    else:
        require_shape(f, (0.0, top), "prop4_1", concave=True, nonnegative=True)
    ts = _trace(apply_fn(f, a + b, tol))
    ta, tb = _trace(apply_fn(f, a, tol)), _trace(apply_fn(f, b, tol))
    margin = ts - ta - tb if variant == "convex" else ta + tb - ts
    details = {"trace_sum": ts, "trace_a": ta, "trace_b": tb}
    notes = ""
    if isinstance(f, PositivePartShift):
        vec = rotfeld_vector_margins(a, b, f.beta, tol)
        details["vector_margins"] = [float(m) for m in vec]
        notes = "per-eigenvector certificate over an eigenbasis of A+B"
    return make_report(
        "prop4_1", {"trace_margin": margin}, max(abs(ts), abs(ta) + abs(tb)), tol,
        {"f": f, "A": a, "B": b, "variant": variant}, notes=notes, details=details,
    )
