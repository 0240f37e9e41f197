"""Checkers for the two open questions; a failure is a counterexample, a pass proves nothing.

Two-unitary question: for convex (not necessarily even) ``f``, are there
unitaries ``U, V`` with ``2 f((A+B)/2) <= U f(A) U* + V f(B) V*``?  Such a
pair exists iff some spectrum ``c`` of a sum of the two unitary orbits
dominates ``lambda(X)`` entrywise.  Every such ``c`` satisfies the Weyl,
Ky Fan and bottom-sum inequalities checked below, so a negative margin
rules out every pair ``U, V``.  For ``n <= 2`` these inequalities describe
the reachable spectra exactly, so the test is decisive there.

Norm question: does ``||f(Z*AZ)|| <= ||Z*f(A)Z||`` survive for nonnegative
concave ``f`` that is not monotone (operator norm), and for monotone ``f``
in every Ky Fan norm?
"""

from __future__ import annotations

import numpy as np

from hermineq.errors import DimensionMismatch
from hermineq.numerics import (
    DEFAULT_TOL,
    Tolerance,
    check_hermitian,
    dagger,
    eigvalsh,
    opnorm,
)
from hermineq.dominance import ky_fan_dominates
from hermineq.opcalc import apply_fn, require_expansive, require_psd
from hermineq.scalarfn import ScalarFunction
from hermineq.theorems.report import CheckReport, make_report, require_shape, spectral_interval


def two_orbit_margins(x_eigs, p_eigs, q_eigs) -> dict[str, float]:
    """Necessary conditions for some ``c`` in the spectra of ``P + VQV*`` with ``c >= x``.

    All inputs are descending eigenvalue vectors of equal length ``n``.
    Returns the smallest slack of each family of inequalities:

    * ``weyl``: ``x_k <= p_i + q_j`` whenever ``i + j = k + 1``;
    * ``ky_fan``: ``x_1 + ... + x_k <= (p_1 + ... + p_k) + (q_1 + ... + q_k)``;
    * ``bottom``: the sum of the ``m`` smallest ``x`` is at most
      ``min(bottom_m(p) + top_m(q), top_m(p) + bottom_m(q))``.
    """
    x, p, q = (np.asarray(v, dtype=float) for v in (x_eigs, p_eigs, q_eigs))
    n = x.size
    if p.size != n or q.size != n:
        raise DimensionMismatch("eigenvalue vectors must have equal length")
    weyl = min(min(p[i] + q[k - i] for i in range(k + 1)) - x[k] for k in range(n))
    cx, cp, cq = np.cumsum(x), np.cumsum(p), np.cumsum(q)
    ky_fan = float(np.min(cp + cq - cx))
    bx, bp, bq = np.cumsum(x[::-1]), np.cumsum(p[::-1]), np.cumsum(q[::-1])
    bottom = float(np.min(np.minimum(bp + cq, cp + bq) - bx))
    return {"weyl_margin": float(weyl), "ky_fan_margin": ky_fan, "bottom_margin": bottom}


def check_question2_6(f: ScalarFunction, a, b, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """Two-unitary midpoint inequality for a convex ``f`` on the whole line.

    ``holds`` false means no unitaries ``U, V`` exist for this instance.
    ``details["decisive"]`` says whether a pass also proves that they exist
    (true for ``n <= 2``).
    """
    a, b = check_hermitian(a, tol), check_hermitian(b, tol)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    require_shape(f, spectral_interval(a, b, (a + b) / 2), "question2_6", convex=True)
    x = 2 * apply_fn(f, (a + b) / 2, tol)
    xe, pe, qe = eigvalsh(x), eigvalsh(apply_fn(f, a, tol)), eigvalsh(apply_fn(f, b, tol))
    margins = two_orbit_margins(xe, pe, qe)
    scale = float(max(np.max(np.abs(xe)), np.max(np.abs(pe)) + np.max(np.abs(qe))))
    n = a.shape[0]
    details = {"decisive": n <= 2, "trace_margin": float(pe.sum() + qe.sum() - xe.sum())}
    notes = "exact test for n <= 2" if n <= 2 else "necessary conditions only; a pass is inconclusive"
    return make_report("question2_6", margins, scale, tol, {"f": f, "A": a, "B": b}, notes=notes, details=details)


def check_question3_12(f: ScalarFunction, a, z, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """Norm comparison of ``f(Z*AZ)`` and ``Z*f(A)Z`` for nonnegative concave ``f``.

    The operator-norm margin is always reported.  Ky Fan margins join the
    verdict only when ``f`` is nondecreasing, which is the setting of the
    unitarily-invariant-norm part of the question.
    """
    a = require_psd(a, tol)
    z = require_expansive(z)
    zaz = dagger(z) @ a @ z
    zaz = (zaz + dagger(zaz)) / 2
    b = max(float(eigvalsh(zaz)[0]), float(eigvalsh(a)[0]))
    prof = require_shape(f, (0.0, b), "question3_12", concave=True, nonnegative=True)
    lhs = apply_fn(f, zaz, tol)
    rhs = dagger(z) @ apply_fn(f, a, tol) @ z
    rhs = (rhs + dagger(rhs)) / 2
    nl, nr = opnorm(lhs), opnorm(rhs)
    margins = {"opnorm_margin": nr - nl}
    kf = ky_fan_dominates(lhs, rhs, tol)
    details = {"nondecreasing": prof.nondecreasing, "ky_fan_margins": kf.margins}
    if prof.nondecreasing:
        margins["ky_fan_min_margin"] = kf.min_margin
    return make_report(
        "question3_12", margins, max(nl, nr, kf.scale), tol, {"f": f, "A": a, "Z": z}, details=details,
        notes="a pass is inconclusive: the question is open",
    )
