"""Dense complex matrix helpers and a cyclic Jacobi Hermitian eigensolver.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; :func:`as_matrix`
is the single validating entry point.  All functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple

import numpy as np

from hermineq.errors import BadRank, MalformedMatrix, NoConvergence, NotHermitian

JACOBI_MAX_SWEEPS = 100
JACOBI_OFF_RATIO = 1e-12


@dataclass(frozen=True)
class Tolerance:
    """Mixed absolute/relative tolerance.

    A margin ``m`` measured on an instance of size ``scale`` passes when
    ``m >= -(absolute + relative * scale)``.
    """

    absolute: float = 1e-8
    relative: float = 1e-8

    def __post_init__(self):
        if self.absolute < 0 or self.relative < 0:
            raise ValueError("tolerances must be nonnegative")

    def bound(self, scale: float = 0.0) -> float:
        return self.absolute + self.relative * abs(scale)

    def allows(self, margin: float, scale: float = 0.0) -> bool:
        return margin >= -self.bound(scale)

    def to_json(self) -> dict:
        return {"absolute": self.absolute, "relative": self.relative}

    @classmethod
    def from_json(cls, obj) -> "Tolerance":
        if isinstance(obj, (int, float)):
            return cls(float(obj), float(obj))
        return cls(float(obj.get("absolute", 1e-8)), float(obj.get("relative", 1e-8)))


DEFAULT_TOL = Tolerance()


class SpectralDecomposition(NamedTuple):
    eigenvalues: np.ndarray  # real, descending
    eigenvectors: np.ndarray  # columns orthonormal


def as_matrix(x) -> np.ndarray:
    a = np.array(x, dtype=np.complex128)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2:
        raise MalformedMatrix(f"expected a 2-d array, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise MalformedMatrix("matrix has non-finite entries")
    return a


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def opnorm(a: np.ndarray) -> float:
    """Operator (spectral) norm."""
    s = singular_values(a)
    return float(s[0]) if len(s) else 0.0


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return (a + dagger(a)) / 2


def check_hermitian(a: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise NotHermitian(f"matrix is not square: {a.shape}")
    asym = np.linalg.norm(a - dagger(a))
    if asym > tol.absolute * (1 + np.linalg.norm(a)):
        raise NotHermitian(f"||A - A*||_F = {asym:.3e}")
    return hermitian_part(a)


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    apq = a[p, q]
    r = abs(apq)
    phase = apq / r
    theta = 0.5 * math.atan2(2 * r, (a[p, p] - a[q, q]).real)
    c, s = math.cos(theta), math.sin(theta)
    # columns (c, s/phase) and (-s, c/phase) are the eigenvectors of the 2x2 block
    ph = 1 / phase
    g00, g01, g10, g11 = c, -s, s * ph, c * ph
    cp, cq = a[:, p].copy(), a[:, q].copy()
    a[:, p] = cp * g00 + cq * g10
    a[:, q] = cp * g01 + cq * g11
    rp, rq = a[p, :].copy(), a[q, :].copy()
    a[p, :] = rp * g00 + rq * np.conj(g10)
    a[q, :] = rp * g01 + rq * np.conj(g11)
    a[p, q] = a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real
    vp, vq = v[:, p].copy(), v[:, q].copy()
    v[:, p] = vp * g00 + vq * g10
    v[:, q] = vp * g01 + vq * g11


def eig_hermitian(a, tol: Tolerance = DEFAULT_TOL) -> SpectralDecomposition:
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.

    Eigenvalues come back in descending order; among equal eigenvalues the
    order left by the sweep is kept.  Raises :class:`NotHermitian` when the
    input is not Hermitian within ``tol`` and :class:`NoConvergence` after
    ``JACOBI_MAX_SWEEPS`` sweeps.
    """
    a = check_hermitian(a, tol).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    fro = np.linalg.norm(a)
    if n > 1 and fro > 0:
        target = JACOBI_OFF_RATIO * fro
        skip = 1e-300 + 1e-20 * fro
        pairs = list(combinations(range(n), 2))
        for _ in range(JACOBI_MAX_SWEEPS):
            off = float(np.linalg.norm(a - np.diag(np.diag(a))))
            if off <= target:
                break
            for p, q in pairs:
                if abs(a[p, q]) > skip:
                    _jacobi_rotate(a, v, p, q)
        else:
            raise NoConvergence(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    w = np.diag(a).real.copy()
    order = np.argsort(-w, kind="stable")
    return SpectralDecomposition(w[order], v[:, order])


def eigvalsh(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    return eig_hermitian(a, tol).eigenvalues


def is_psd(a, tol: Tolerance = DEFAULT_TOL) -> tuple[bool, float]:
    """Return ``(flag, margin)`` with ``margin = lambda_min(a)``."""
    w = eigvalsh(a, tol)
    margin = float(w[-1])
    scale = float(np.max(np.abs(w)))
    return margin >= -tol.absolute * (1 + scale), margin


def loewner_margin(x, y, tol: Tolerance = DEFAULT_TOL) -> float:
    """``lambda_min(y - x)``; nonnegative iff ``x <= y``."""
    return is_psd(as_matrix(y) - as_matrix(x), tol)[1]


def singular_values(x) -> np.ndarray:
    """Singular values, descending.

    Computed as the top eigenvalues of the Hermitian dilation
    ``[[0, X], [X*, 0]]`` whose spectrum is ``{+-s_k}`` plus zeros; this keeps
    small singular values accurate to machine precision times ``||X||``.
    """
    x = as_matrix(x)
    m, n = x.shape
    k = min(m, n)
    if k == 0:
        return np.zeros(0)
    if m == n and np.allclose(x, dagger(x), rtol=0, atol=1e-14 * (1 + np.abs(x).max())):
        return np.sort(np.abs(eigvalsh(x)))[::-1]
    big = np.zeros((m + n, m + n), dtype=np.complex128)
    big[:m, m:] = x
    big[m:, :m] = dagger(x)
    w = eigvalsh(big)
    return np.maximum(w[:k], 0.0)


_DEAD_LOG_GAP = math.log(1e18)


def scaled_column_jacobi(y, log_scales=None) -> tuple[np.ndarray, np.ndarray]:
    """One-sided (Hestenes) Jacobi on ``X = Y diag(exp(log_scales))``.

    Column pairs of ``X`` are rotated until mutually orthogonal, giving
    ``X J = [u_1 s_1, ..., u_n s_n]`` with ``J`` unitary.  Each column is
    stored as a unit vector times ``exp(l)``, so scales far outside the
    floating-point range are handled without underflow, and convergence is
    tested on the cosine between columns.  For column-scaled matrices this
    keeps every singular value to high *relative* accuracy.

    When ``X`` is wide (``m < n``) only ``m`` columns can stay independent;
    a surplus column is retired once it is ``1e18`` times smaller than the
    m-th largest, which perturbs the retained singular values by at most
    that relative amount.

    Returns ``(log_s, U)``: the ``min(m, n)`` largest log singular values in
    descending order and matching unit vectors (``U`` completed to an
    orthonormal set where a singular value is zero, i.e. ``log_s = -inf``).
    """
    y = as_matrix(y).copy()
    m, n = y.shape
    logs = np.zeros(n) if log_scales is None else np.array(log_scales, dtype=float)
    norms = np.linalg.norm(y, axis=0)
    with np.errstate(divide="ignore"):
        logs = logs + np.log(norms)
    live = np.isfinite(logs) & (norms > 0)
    y[:, live] /= norms[live]
    y[:, ~live] = 0.0
    logs[~live] = -np.inf
    keep = min(m, n)
    pairs = list(combinations(range(n), 2))
    for _ in range(JACOBI_MAX_SWEEPS):
        cutoff = np.sort(logs)[::-1][keep - 1] - _DEAD_LOG_GAP if n > keep else -np.inf
        alive = np.isfinite(logs) & (logs >= cutoff)
        rotated = False
        for i, j in pairs:
            if not (alive[i] and alive[j]):
                continue
            if logs[i] < logs[j]:
                i, j = j, i
            g = complex(np.vdot(y[:, i], y[:, j]))
            r = abs(g)
            if r <= 1e-15:
                continue
            rotated = True
            ph = np.conj(g / r)
            t = math.exp(logs[j] - logs[i])  # <= 1
            if t > 1e-150:
                theta = 0.5 * math.atan2(2 * r * t, 1 - t * t)
                c, s = math.cos(theta), math.sin(theta)
                st, s_over_t = s * t, s / t
            else:
                c, st, s_over_t = 1.0, r * t * t, r
            yi, yj = y[:, i].copy(), y[:, j].copy()
            new_i = c * yi + st * ph * yj
            new_j = -s_over_t * yi + c * ph * yj
            for k, vec in ((i, new_i), (j, new_j)):
                nu = float(np.linalg.norm(vec))
                if nu == 0.0:
                    y[:, k] = 0.0
                    logs[k] = -np.inf
                    alive[k] = False
                else:
                    y[:, k] = vec / nu
                    logs[k] += math.log(nu)
        if not rotated:
            break
    else:
        raise NoConvergence(f"one-sided Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    order = np.argsort(-logs, kind="stable")[:keep]
    log_s = logs[order]
    u = np.zeros((m, keep), dtype=np.complex128)
    ok = np.isfinite(log_s)
    u[:, ok] = y[:, order[ok]]
    if not np.all(ok):
        q, _ = np.linalg.qr(np.hstack([u[:, ok], np.eye(m)]))
        u[:, ~ok] = q[:, int(ok.sum()) : keep]
    return log_s, u


def column_jacobi(x) -> tuple[np.ndarray, np.ndarray]:
    """Singular values (descending) and left singular vectors by one-sided Jacobi.

    See :func:`scaled_column_jacobi`; this is the unscaled entry point.
    """
    log_s, u = scaled_column_jacobi(x)
    return np.exp(log_s), u


def ky_fan_norm(x, k: int) -> float:
    """Sum of the ``k`` largest singular values."""
    x = as_matrix(x)
    if not 1 <= k <= min(x.shape):
        raise BadRank(f"k={k} outside [1, {min(x.shape)}]")
    return float(np.sum(singular_values(x)[:k]))


def _det(sub: np.ndarray) -> complex:
    return complex(np.linalg.det(sub)) if sub.size else 1.0


def compound(a, k: int) -> np.ndarray:
    """k-th compound matrix: all k x k minors on lexicographic index sets."""
    a = as_matrix(a)
    n = a.shape[0]
    if a.shape[1] != n:
        raise BadRank("compound requires a square matrix")
    if not 1 <= k <= n:
        raise BadRank(f"k={k} outside [1, {n}]")
    idx = list(combinations(range(n), k))
    out = np.empty((len(idx), len(idx)), dtype=np.complex128)
    for i, rows in enumerate(idx):
        sub = a[list(rows), :]
        for j, cols in enumerate(idx):
            out[i, j] = _det(sub[:, list(cols)])
    return out


def compound_law_defect(a, k: int) -> float:
    """Relative gap between the spectrum of ``compound(A, k)`` and the k-fold eigenvalue products.

    For Hermitian ``A`` the eigenvalues of the k-th compound are all products
    ``lambda_{i_1} ... lambda_{i_k}`` with ``i_1 < ... < i_k``.  The defect is
    measured relative to the largest such product in magnitude (at least 1).
    """
    w = eigvalsh(a)
    products = np.array([np.prod(w[list(c)]) for c in combinations(range(len(w)), k)])
    got = eigvalsh(compound(a, k))
    want = np.sort(products)[::-1]
    return float(np.max(np.abs(got - want)) / max(1.0, float(np.max(np.abs(want)))))


def polar_unitary(x) -> np.ndarray:
    """Unitary ``W`` with ``X = W |X|``.

    Backed by LAPACK's SVD ``X = P S Q*`` so that ``W = P Q*`` pairs the
    kernels of ``X`` and ``X*`` automatically.
    """
    x = as_matrix(x)
    if x.shape[0] != x.shape[1]:
        raise BadRank("polar_unitary requires a square matrix")
    p, _, qh = np.linalg.svd(x)
    return p @ qh


def is_unitary(u, atol: float = 1e-9) -> bool:
    u = as_matrix(u)
    return u.shape[0] == u.shape[1] and bool(
        np.linalg.norm(dagger(u) @ u - np.eye(u.shape[0])) <= atol
    )


def matrix_to_json(a) -> dict:
    a = as_matrix(a)
    flat = a.reshape(-1)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "re": [float(z) for z in flat.real],
        "im": [float(z) for z in flat.imag],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re = obj["re"]
        im = obj.get("im")
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedMatrix(f"bad matrix object: {exc}") from exc
    if im is None:
        im = [0.0] * len(re)
    if rows < 0 or cols < 0 or len(re) != rows * cols or len(im) != rows * cols:
        raise MalformedMatrix(
            f"entry count mismatch: rows*cols={rows * cols}, re={len(re)}, im={len(im)}"
        )
    data = np.asarray(re, dtype=float) + 1j * np.asarray(im, dtype=float)
    return as_matrix(data.reshape(rows, cols))
