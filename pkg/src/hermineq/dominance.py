"""Eigenvalue dominance, witness unitaries and the constructive decompositions.

``X`` is dominated by ``Y`` when ``lambda_k(X) <= lambda_k(Y)`` for every
``k``; this is equivalent to ``X <= U Y U*`` for some unitary ``U``, and
:func:`witness_unitary` builds such a ``U`` explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from hermineq.errors import ConstructionFailed, DimensionMismatch, DominanceFails
from hermineq.numerics import (
    DEFAULT_TOL,
    Tolerance,
    as_matrix,
    check_hermitian,
    dagger,
    eig_hermitian,
    is_psd,
    matrix_to_json,
    polar_unitary,
    singular_values,
)
from hermineq.opcalc import matrix_abs


@dataclass
class DominanceVerdict:
    holds: bool
    per_index_margins: list[float]
    witness: Optional[np.ndarray] = None
    psd_margin: Optional[float] = None
    scale: float = 0.0

    @property
    def min_margin(self) -> float:
        return min(self.per_index_margins) if self.per_index_margins else 0.0

    @property
    def failing_indices(self) -> list[int]:
        """1-based indices ``k`` where ``lambda_k(X) > lambda_k(Y)``."""
        return [k + 1 for k, m in enumerate(self.per_index_margins) if m < 0]

    def to_json(self) -> dict:
        out = {"holds": self.holds, "per_index_margins": list(self.per_index_margins)}
        if self.witness is not None:
            out["witness"] = matrix_to_json(self.witness)
            out["psd_margin"] = self.psd_margin
        return out


def _pair(x, y, tol):
    x = check_hermitian(x, tol)
    y = check_hermitian(y, tol)
    if x.shape != y.shape:
        raise DimensionMismatch(f"{x.shape} vs {y.shape}")
    return x, y


def _scale(wx, wy) -> float:
    """Largest eigenvalue magnitude of either side; margins pass above ``-tol.bound(scale)``."""
    return max(float(np.max(np.abs(wx), initial=0.0)), float(np.max(np.abs(wy), initial=0.0)))


def eigen_dominates(x, y, tol: Tolerance = DEFAULT_TOL) -> DominanceVerdict:
    """Compare descending spectra; margins are ``lambda_k(Y) - lambda_k(X)``."""
    x, y = _pair(x, y, tol)
    wx = eig_hermitian(x, tol).eigenvalues
    wy = eig_hermitian(y, tol).eigenvalues
    margins = [float(m) for m in wy - wx]
    scale = _scale(wx, wy)
    holds = min(margins, default=0.0) >= -tol.bound(scale)
    return DominanceVerdict(holds, margins, scale=scale)


def witness_unitary(x, y, tol: Tolerance = DEFAULT_TOL) -> DominanceVerdict:
    """Unitary ``U = sum_k x_k y_k*`` with ``X <= U Y U*``.

    ``x_k``, ``y_k`` are eigenvectors of ``X`` and ``Y`` in descending
    eigenvalue order, so ``U Y U* - X = sum_k (lambda_k(Y) - lambda_k(X)) x_k x_k*``.
    The PSD certificate is re-checked on the assembled matrices.
    """
    x, y = _pair(x, y, tol)
    ex = eig_hermitian(x, tol)
    ey = eig_hermitian(y, tol)
    margins = [float(m) for m in ey.eigenvalues - ex.eigenvalues]
    scale = _scale(ex.eigenvalues, ey.eigenvalues)
    if min(margins, default=0.0) < -tol.bound(scale):
        k = int(np.argmin(margins)) + 1
        raise DominanceFails(f"lambda_{k}(X) exceeds lambda_{k}(Y) by {-min(margins):.6g}")
    u = ex.eigenvectors @ dagger(ey.eigenvectors)
    _, psd_margin = is_psd(u @ y @ dagger(u) - x, tol)
    holds = psd_margin >= -tol.bound(scale)
    return DominanceVerdict(holds, margins, u, psd_margin, scale)


def hermitian_real_part(y) -> np.ndarray:
    y = as_matrix(y)
    return (y + dagger(y)) / 2


def thompson_decompose(a, b, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray, float]:
    """Unitaries ``U, V`` with ``|A+B| <= U|A|U* + V|B|V*``.

    With ``A + B = W |A+B|`` (polar form), ``|A+B| = Re(W*A) + Re(W*B)`` and
    ``lambda_k(Re(W*X)) <= s_k(X) = lambda_k(|X|)``, so witnesses for the two
    dominated pairs give ``U`` and ``V``.  Returns ``(U, V, psd_margin)``.
    """
    a, b = _pair(a, b, tol)
    s = a + b
    w = polar_unitary(s)
    ra = hermitian_real_part(dagger(w) @ a)
    rb = hermitian_real_part(dagger(w) @ b)
    abs_a, abs_b, abs_s = matrix_abs(a, tol), matrix_abs(b, tol), matrix_abs(s, tol)
    try:
        u = witness_unitary(ra, abs_a, tol).witness
        v = witness_unitary(rb, abs_b, tol).witness
    except DominanceFails as exc:
        raise ConstructionFailed(f"Fan-Hoffman step failed: {exc}") from exc
    total = u @ abs_a @ dagger(u) + v @ abs_b @ dagger(v)
    _, margin = is_psd(total - abs_s, tol)
    scale = float(singular_values(total)[0])
    if margin < -tol.bound(scale):
        raise ConstructionFailed(f"|A+B| <= U|A|U* + V|B|V* fails with margin {margin:.3e}")
    return u, v, margin


@dataclass
class KyFanVerdict:
    holds: bool
    margins: list[float] = field(default_factory=list)
    scale: float = 0.0

    @property
    def min_margin(self) -> float:
        return min(self.margins) if self.margins else 0.0


def ky_fan_dominates(x, y, tol: Tolerance = DEFAULT_TOL) -> KyFanVerdict:
    """``||X||_(k) <= ||Y||_(k)`` for every ``k``.

    When this holds, ``||X|| <= ||Y||`` in every unitarily invariant norm.
    """
    x, y = as_matrix(x), as_matrix(y)
    if x.shape != y.shape:
        raise DimensionMismatch(f"{x.shape} vs {y.shape}")
    sx = np.cumsum(singular_values(x))
    sy = np.cumsum(singular_values(y))
    margins = [float(m) for m in sy - sx]
    scale = max(float(sx[-1]), float(sy[-1]))
    return KyFanVerdict(min(margins) >= -tol.bound(scale), margins, scale)
