"""Compressions to subspaces: the unitary Jensen inequality and the power-mean map.

For a subspace ``E`` with orthonormal basis ``S`` the compression of ``A`` is
``A_E = S* A S``.  For monotone convex ``f`` there is a unitary ``U`` with
``f(A_E) <= U f(A)_E U*``; for the operator convex whitelist the unitary is
not needed.  :func:`study_pmap` follows ``p -> ((A^p)_E)^{1/p}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from hermineq.errors import DimensionMismatch, GenericityFailed, HypothesisViolated, NotPSD
from hermineq.numerics import (
    DEFAULT_TOL,
    Tolerance,
    check_hermitian,
    dagger,
    eig_hermitian,
    is_psd,
    loewner_margin,
    scaled_column_jacobi,
    singular_values,
)
from hermineq.opcalc import Subspace, apply_fn, compress
from hermineq.scalarfn import Affine, Power, Pwl, ScalarFunction
from hermineq.theorems.report import (
    CheckReport,
    dominance_margins,
    make_report,
    require_domain,
    require_monotone_convex,
    spectral_interval,
)

GENERICITY_FLOOR = 1e-8
MONOTONE_SLACK = 1e-9
DEFAULT_P_GRID = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0)
GAP_FACTOR = 1.5


def averaging_embedding(a_list) -> tuple[np.ndarray, Subspace]:
    """``diag(A_1, ..., A_m)`` and ``S = [I; ...; I]/sqrt(m)``.

    Compressing to ``span(S)`` gives the average ``(A_1 + ... + A_m)/m``, and
    ``f(diag(A_i))`` compresses to the average of the ``f(A_i)``.
    """
    a_list = [check_hermitian(a) for a in a_list]
    n, m = a_list[0].shape[0], len(a_list)
    big = np.zeros((m * n, m * n), dtype=np.complex128)
    for i, a in enumerate(a_list):
        big[i * n : (i + 1) * n, i * n : (i + 1) * n] = a
    basis = np.vstack([np.eye(n)] * m) / np.sqrt(m)
    return big, Subspace(basis)


def check_thm1_1(
    f: ScalarFunction, a, s: Subspace, tol: Tolerance = DEFAULT_TOL, strict: bool = True
) -> CheckReport:
    """``f(A_E) <= U f(A)_E U*`` for monotone convex (or unitary convex) ``f``.

    With ``strict=False`` the hypothesis check is skipped so the inequality
    can be probed on functions outside the class (e.g. ``|t|``).
    """
    a = check_hermitian(a, tol)
    interval = spectral_interval(a)
    notes = ""
    if strict:
        notes = f"hypothesis: {require_monotone_convex(f, interval, 'thm1_1')}"
    x = apply_fn(f, compress(a, s), tol)
    y = compress(apply_fn(f, a, tol), s)
    margins, witnesses, scale, details = dominance_margins(x, y, tol)
    return make_report("thm1_1", margins, scale, tol, {"f": f, "A": a, "S": s}, witnesses, notes, details)


def _operator_convex_whitelisted(f: ScalarFunction) -> bool:
    if isinstance(f, Power):
        return 1.0 <= f.p <= 2.0
    if isinstance(f, Pwl):
        return not f.kinks
    return isinstance(f, Affine)


def check_davis(f: ScalarFunction, a, s: Subspace, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """``f(A_E) <= f(A)_E`` in the Loewner order, no unitary (operator convex ``f``)."""
    if not _operator_convex_whitelisted(f):
        raise HypothesisViolated(f"davis_1: {f!r} is not in the operator convex whitelist")
    a = check_hermitian(a, tol)
    require_domain(f, spectral_interval(a), "davis_1")
    x = apply_fn(f, compress(a, s), tol)
    y = compress(apply_fn(f, a, tol), s)
    margin = loewner_margin(x, y, tol)
    scale = max(float(singular_values(x)[0]), float(singular_values(y)[0]))
    return make_report("davis_1", {"psd_margin": margin}, scale, tol, {"f": f, "A": a, "S": s})


# ---------------------------------------------------------------------------
# power-mean map


def genericity_sigma(a, s: Subspace) -> float:
    """Smallest singular value of ``F_d* S`` with ``F_d`` the top-``d`` eigenvectors of ``A``.

    Positive exactly when ``E`` meets ``span{f_j : j > d}`` only in 0.
    """
    d = s.dim
    f_top = eig_hermitian(a).eigenvectors[:, :d]
    return float(singular_values(dagger(f_top) @ s.basis)[-1])


def pmap_point(a, s: Subspace, p: float, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """``M_p = ((A^p)_E)^{1/p}`` and its eigenvalues (descending).

    With ``A = V diag(lambda) V*`` and ``r = lambda/lambda_1``, the compression
    is ``(A^p)_E = lambda_1^p G* G`` where ``G = diag(r^{p/2}) V* S``.  The
    singular pairs of ``G*`` (a column-scaled matrix) come from one-sided
    Jacobi, which keeps each eigenvalue of ``M_p`` to relative accuracy even
    when ``r_k^p`` underflows the working precision of a plain eigensolver.
    """
    if p <= 0:
        raise ValueError("p must be positive")
    w, v = eig_hermitian(a, tol)
    top = float(w[0]) if w.size else 0.0
    if w.size and w[-1] < -tol.absolute * (1 + abs(top)):
        raise NotPSD(f"lambda_min = {w[-1]:.3e}")
    d = s.dim
    if top <= 0:
        return np.zeros((d, d), dtype=np.complex128), np.zeros(d)
    r = np.clip(w / top, 0.0, None)
    with np.errstate(divide="ignore"):
        log_d = (p / 2) * np.log(r)
    log_s, u = scaled_column_jacobi(dagger(dagger(v) @ s.basis), log_d)
    eigs = top * np.exp(log_s * (2.0 / p))
    m = (u * eigs) @ dagger(u)
    return (m + dagger(m)) / 2, eigs


@dataclass
class PmapTrajectory:
    """Eigenvalue trajectory of ``p -> ((A^p)_E)^{1/p}`` on a grid."""

    p_grid: list[float]
    per_p_eigenvalues: np.ndarray
    limit_targets: np.ndarray
    loewner_flags: list[bool]
    loewner_margins: list[float]
    genericity_ok: bool
    genericity_sigma: float
    monotone_ok: bool
    monotone_min_step: float
    limit_gaps: np.ndarray
    oracle_gaps: np.ndarray
    gap_weights: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def loewner_ok(self) -> bool:
        return all(self.loewner_flags)

    @property
    def gap_ok(self) -> bool:
        """Limit gap below ``GAP_FACTOR`` times the matched-weight oracle gap, for every k."""
        return bool(np.all(self.limit_gaps <= GAP_FACTOR * self.oracle_gaps + 1e-12))

    def csv_rows(self) -> list[list[float]]:
        return [[p, *map(float, row)] for p, row in zip(self.p_grid, self.per_p_eigenvalues)]

    def to_json(self) -> dict:
        return {
            "p_grid": list(self.p_grid),
            "per_p_eigenvalues": [[float(x) for x in row] for row in self.per_p_eigenvalues],
            "limit_targets": [float(x) for x in self.limit_targets],
            "loewner_flags": list(self.loewner_flags),
            "loewner_margins": list(self.loewner_margins),
            "loewner_ok": self.loewner_ok,
            "genericity_ok": self.genericity_ok,
            "genericity_sigma": self.genericity_sigma,
            "monotone_ok": self.monotone_ok,
            "monotone_min_step": self.monotone_min_step,
            "limit_gaps": [float(x) for x in self.limit_gaps],
            "oracle_gaps": [float(x) for x in self.oracle_gaps],
            "gap_weights": [float(x) for x in self.gap_weights],
            "gap_ok": self.gap_ok,
        }


def oracle_gap_weights(a, s: Subspace) -> np.ndarray:
    """``w_k = det(F_k* P_E F_k)`` for ``k = 1..d``.

    ``F_k`` holds the top-``k`` eigenvectors of ``A``; ``w_k`` is the squared
    overlap of ``f_1 ^ ... ^ f_k`` with the k-th exterior power of ``E``.
    """
    fv = eig_hermitian(a).eigenvectors
    proj = dagger(s.basis) @ fv
    out = []
    for k in range(1, s.dim + 1):
        sv = singular_values(proj[:, :k])
        out.append(float(np.prod(sv[:k] ** 2)))
    return np.array(out)


def oracle_gap(target: float, weight: float, p: float) -> float:
    """Gap ``lambda (1 - w^{1/p})`` of the 1x1 closed form ``(w lambda^p + (1-w) mu^p)^{1/p}`` at ``mu = 0``.

    Since ``mu = 0`` is the slowest case, this is an upper bound for the
    gap ``lambda_k(A) - lambda_k(M_p)`` when ``w = w_k``.
    """
    if weight <= 0:
        return float("inf")
    return float(target * (1.0 - weight ** (1.0 / p)))


def study_pmap(a, s: Subspace, p_grid=DEFAULT_P_GRID, tol: Tolerance = DEFAULT_TOL) -> PmapTrajectory:
    """Evaluate the power-mean map on ``p_grid`` and test its monotonicity.

    Raises :class:`GenericityFailed` unless ``E`` is in general position
    with respect to the eigenvectors beyond the d-th.
    """
    a = check_hermitian(a, tol)
    grid = sorted(float(p) for p in p_grid)
    if not grid or grid[0] <= 0:
        raise ValueError("p_grid must contain positive values")
    if s.ambient_dim != a.shape[0]:
        raise DimensionMismatch(f"A is {a.shape}, subspace lives in C^{s.ambient_dim}")
    ok, _ = is_psd(a, tol)
    if not ok:
        raise NotPSD("study_pmap needs a PSD operator")
    sigma = genericity_sigma(a, s)
    if sigma <= GENERICITY_FLOOR:
        raise GenericityFailed(f"sigma_min(F_d* S) = {sigma:.3e} <= {GENERICITY_FLOOR}")

    mats, rows = [], []
    for p in grid:
        m, e = pmap_point(a, s, p, tol)
        mats.append(m)
        rows.append(e)
    eigs = np.array(rows)
    steps = np.diff(eigs, axis=0)
    min_step = float(steps.min()) if steps.size else 0.0

    flags, lmargins = [], []
    for i in range(len(grid) - 1):
        if grid[i] >= 1.0:
            ok, margin = is_psd(mats[i + 1] - mats[i], tol)
            flags.append(bool(ok))
            lmargins.append(float(margin))

    targets = eig_hermitian(a).eigenvalues[: s.dim]
    weights = oracle_gap_weights(a, s)
    pmax = grid[-1]
    gaps = np.abs(eigs[-1] - targets)
    oracle = np.array([oracle_gap(t, w, pmax) for t, w in zip(targets, weights)])
    return PmapTrajectory(
        p_grid=grid,
        per_p_eigenvalues=eigs,
        limit_targets=targets,
        loewner_flags=flags,
        loewner_margins=lmargins,
        genericity_ok=True,
        genericity_sigma=sigma,
        monotone_ok=min_step >= -MONOTONE_SLACK,
        monotone_min_step=min_step,
        limit_gaps=gaps,
        oracle_gaps=oracle,
        gap_weights=weights,
    )


def check_thm1_2(a, s: Subspace, p_grid=DEFAULT_P_GRID, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """Report form of :func:`study_pmap`.

    Margins: smallest eigenvalue step along the grid, smallest Loewner
    margin between consecutive ``p >= 1``, and the slack of the limit gap
    below ``GAP_FACTOR`` times the oracle gap.
    """
    traj = study_pmap(a, s, p_grid, tol)
    margins = {
        "monotone_min_step": traj.monotone_min_step,
        "loewner_min_margin": min(traj.loewner_margins, default=0.0),
        "limit_gap_slack": float(np.min(GAP_FACTOR * traj.oracle_gaps - traj.limit_gaps)),
    }
    scale = float(traj.limit_targets[0]) if traj.limit_targets.size else 0.0
    return make_report(
        "thm1_2",
        margins,
        scale,
        tol,
        {"A": check_hermitian(a), "S": s, "p_grid": list(traj.p_grid)},
        details=traj.to_json(),
    )
