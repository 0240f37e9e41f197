"""Operator calculus: f(A), compressions, positive parts, dilations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hermineq.errors import (
    DimensionMismatch,
    MalformedMatrix,
    NotContraction,
    NotExpansive,
    NotIsometricColumn,
    NotPSD,
    SpectrumOutOfDomain,
)
from hermineq.numerics import (
    DEFAULT_TOL,
    Tolerance,
    as_matrix,
    dagger,
    eig_hermitian,
    eigvalsh,
    matrix_from_json,
    matrix_to_json,
    singular_values,
)
from hermineq.scalarfn import PositivePartShift, ScalarFunction

CLASS_TOL = 1e-10
COLUMN_TOL = 1e-8
TINY = 1e-300


@dataclass(frozen=True, eq=False)
class Subspace:
    """Orthonormal basis (``n x d``) of a subspace of ``C^n``."""

    basis: np.ndarray

    def __post_init__(self):
        s = as_matrix(self.basis)
        n, d = s.shape
        if not 1 <= d <= n:
            raise MalformedMatrix(f"subspace basis must be n x d with 1 <= d <= n, got {s.shape}")
        if np.linalg.norm(dagger(s) @ s - np.eye(d)) > 1e-10:
            raise MalformedMatrix("subspace basis columns are not orthonormal")
        object.__setattr__(self, "basis", s)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def projection(self) -> np.ndarray:
        return self.basis @ dagger(self.basis)

    @classmethod
    def span(cls, vectors) -> "Subspace":
        """Orthonormalise the columns of ``vectors``."""
        q, _ = np.linalg.qr(as_matrix(vectors))
        return cls(q)

    @classmethod
    def coordinate(cls, n: int, indices) -> "Subspace":
        return cls(np.eye(n, dtype=np.complex128)[:, list(indices)])

    def to_json(self) -> dict:
        return matrix_to_json(self.basis)

    @classmethod
    def from_json(cls, obj) -> "Subspace":
        return cls(matrix_from_json(obj))


def _spectrum_in_domain(f: ScalarFunction, w: np.ndarray, tol: Tolerance) -> np.ndarray:
    lo, hi = f.domain
    slack = tol.bound(float(np.max(np.abs(w))) if w.size else 0.0)
    if np.any(w < lo - slack) or np.any(w > hi + slack):
        raise SpectrumOutOfDomain(
            f"spectrum [{w.min():.6g}, {w.max():.6g}] outside domain {f.domain} of {f!r}"
        )
    # rounding noise just outside the domain is pulled back onto its boundary
    return np.clip(w, lo, hi)


def apply_fn(f: ScalarFunction, a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Spectral calculus ``f(A) = V diag(f(lambda)) V*`` for Hermitian ``A``."""
    w, v = eig_hermitian(a, tol)
    w = _spectrum_in_domain(f, w, tol)
    fw = f._raw(w)
    out = (v * fw) @ dagger(v)
    return (out + dagger(out)) / 2


def compress(a, s: Subspace) -> np.ndarray:
    """``S* A S``: the compression of ``A`` onto ``span(S)``."""
    a = as_matrix(a)
    if a.shape != (s.ambient_dim, s.ambient_dim):
        raise DimensionMismatch(f"operator {a.shape} vs subspace in C^{s.ambient_dim}")
    return dagger(s.basis) @ a @ s.basis


def psd_power(a, p: float, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``A**p`` for PSD ``A``, computed as ``lambda_1**p (A/lambda_1)**p``.

    Eigenvalues below ``1e-300`` (after normalisation) are treated as 0.
    """
    w, v = eig_hermitian(a, tol)
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    if w.size and w[-1] < -tol.bound(scale):
        raise NotPSD(f"lambda_min = {w[-1]:.3e}")
    if scale == 0.0:
        return np.zeros_like(v)
    r = np.clip(w / scale, 0.0, None)
    r[r < TINY] = 0.0
    rp = np.power(r, p)
    rp[r == 0.0] = 0.0
    out = (v * rp) @ dagger(v)
    return scale**p * (out + dagger(out)) / 2


def positive_part_shift(a, beta: float, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``(A - beta I)_+``."""
    return apply_fn(PositivePartShift(beta), a, tol)


def matrix_abs(x, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``|X| = (X* X)^{1/2}``."""
    x = as_matrix(x)
    if x.shape[0] != x.shape[1]:
        raise DimensionMismatch("matrix_abs requires a square matrix")
    herm = np.allclose(x, dagger(x), rtol=0, atol=1e-14 * (1 + np.abs(x).max()))
    if herm:
        w, v = eig_hermitian(x, tol)
        out = (v * np.abs(w)) @ dagger(v)
    else:
        xx = dagger(x) @ x
        return psd_power((xx + dagger(xx)) / 2, 0.5, tol)
    return (out + dagger(out)) / 2


def support_projection(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Projection onto the span of eigenvectors with ``lambda > tol.absolute*(1+lambda_1)``."""
    w, v = eig_hermitian(a, tol)
    top = float(w[0]) if w.size else 0.0
    if w.size and w[-1] < -tol.absolute * (1 + abs(top)):
        raise NotPSD(f"lambda_min = {w[-1]:.3e}")
    keep = w > tol.absolute * (1 + top)
    vk = v[:, keep]
    return vk @ dagger(vk)


def rank(a, tol: Tolerance = DEFAULT_TOL) -> int:
    return int(np.round(np.trace(support_projection(a, tol)).real))


# ---------------------------------------------------------------------------
# operator classes


def contraction_margin(z) -> float:
    """``1 - ||Z||``; nonnegative for contractions."""
    return 1.0 - float(singular_values(z)[0])


def expansive_margin(z) -> float:
    """``lambda_min(Z*Z) - 1``; nonnegative for expansive operators."""
    z = as_matrix(z)
    return float(eigvalsh(dagger(z) @ z)[-1]) - 1.0


def column_defect(zs) -> float:
    """``||sum Z_i* Z_i - I||_F``."""
    zs = [as_matrix(z) for z in zs]
    n = zs[0].shape[1]
    total = sum(dagger(z) @ z for z in zs)
    return float(np.linalg.norm(total - np.eye(n)))


def is_contraction(z) -> bool:
    return contraction_margin(z) >= -CLASS_TOL


def is_expansive(z) -> bool:
    return expansive_margin(z) >= -CLASS_TOL


def is_isometric_column(zs) -> bool:
    return column_defect(zs) <= COLUMN_TOL


def require_contraction(z) -> np.ndarray:
    z = as_matrix(z)
    if not is_contraction(z):
        raise NotContraction(f"||Z|| = {1 - contraction_margin(z):.12g} > 1")
    return z


def require_expansive(z) -> np.ndarray:
    z = as_matrix(z)
    if z.shape[0] != z.shape[1]:
        raise NotExpansive("expansive operators are square here")
    if not is_expansive(z):
        raise NotExpansive(f"lambda_min(Z*Z) = {1 + expansive_margin(z):.12g} < 1")
    return z


def require_isometric_column(zs) -> list[np.ndarray]:
    zs = [as_matrix(z) for z in zs]
    if not zs or len({z.shape[1] for z in zs}) != 1:
        raise NotIsometricColumn("blocks must share a column count")
    d = column_defect(zs)
    if d > COLUMN_TOL:
        raise NotIsometricColumn(f"||sum Z_i* Z_i - I||_F = {d:.3e}")
    return zs


def require_psd(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    a = as_matrix(a)
    w = eigvalsh(a, tol)
    if w[-1] < -tol.absolute * (1 + abs(w[0])):
        raise NotPSD(f"lambda_min = {w[-1]:.3e}")
    return (a + dagger(a)) / 2


# ---------------------------------------------------------------------------
# dilations


def defect(z, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``(I - |Z|^2)^{1/2}`` for a contraction ``Z``."""
    z = require_contraction(z)
    n = z.shape[1]
    d2 = np.eye(n) - dagger(z) @ z
    return psd_power((d2 + dagger(d2)) / 2, 0.5, Tolerance(max(tol.absolute, 1e-9), tol.relative))


def dilate_contraction(z, a, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Partial isometry ``V = [[Z, 0], [D, 0]]`` and ``Atilde = A (+) 0``.

    ``V*V`` projects onto the first summand and ``V* Atilde V`` restricted
    there is ``Z* A Z``.
    """
    z = require_contraction(z)
    a = as_matrix(a)
    n = z.shape[0]
    if z.shape != (n, n) or a.shape != (n, n):
        raise DimensionMismatch("Z and A must be square of the same size")
    v = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    v[:n, :n] = z
    v[n:, :n] = defect(z, tol)
    at = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    at[:n, :n] = a
    return v, at


def column_dilation(zs, a_list) -> tuple[Subspace, np.ndarray]:
    """Stacked isometry ``[Z_1; ...; Z_m]`` and ``diag(A_1, ..., A_m)``."""
    zs = require_isometric_column(zs)
    a_list = [as_matrix(a) for a in a_list]
    if len(a_list) != len(zs):
        raise DimensionMismatch("need one A_i per Z_i")
    stacked = np.vstack(zs)
    q, r = np.linalg.qr(stacked)
    # stacked is already an isometry; re-orthonormalise rounding noise only
    phases = np.diag(r) / np.abs(np.diag(r))
    basis = q * phases
    blocks = [a.shape[0] for a in a_list]
    big = np.zeros((sum(blocks), sum(blocks)), dtype=np.complex128)
    o = 0
    for a in a_list:
        k = a.shape[0]
        big[o : o + k, o : o + k] = a
        o += k
    if basis.shape[0] != big.shape[0]:
        raise DimensionMismatch("Z_i row counts must match A_i sizes")
    return Subspace(basis), big

