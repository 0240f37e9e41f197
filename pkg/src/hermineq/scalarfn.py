"""Symbolic scalar functions with exact evaluation and shape profiling.

Every function is an immutable value.  Bodies:

* :class:`Pwl`  ``c + slope*t + sum(alpha_i * (t - beta_i)_+)`` with ``alpha_i >= 0``
* :class:`Power`  ``t**p`` on ``[0, inf)``
* :class:`AbsoluteValue`, :class:`PositivePartShift`, :class:`Affine`
* :class:`Negate`, :class:`Compose` (restricted, see below), :class:`Psi`

``Compose(outer, inner)`` models ``phi o g`` with ``phi`` nondecreasing convex
and ``g`` in a small whitelist of operator convex functions; anything else
is rejected at construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from hermineq.errors import NotAdmissible, NotInvertible, OutOfDomain

INF = math.inf
REAL_LINE = (-INF, INF)
HALF_LINE = (0.0, INF)
DEFAULT_GRID = 101


class ScalarFunction:
    """Base class; subclasses implement ``_raw`` (vectorised, no domain check)."""

    kind = "?"

    @property
    def domain(self) -> tuple[float, float]:  # pragma: no cover - overridden
        raise NotImplementedError

    def _raw(self, t: np.ndarray) -> np.ndarray:  # pragma: no cover - overridden
        raise NotImplementedError

    def in_domain(self, t) -> np.ndarray:
        lo, hi = self.domain
        t = np.asarray(t, dtype=float)
        return (t >= lo) & (t <= hi)

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        if not np.all(self.in_domain(arr)):
            raise OutOfDomain(f"{self!r} evaluated outside its domain {self.domain}")
        out = self._raw(arr)
        return float(out) if np.ndim(t) == 0 else out

    def to_json(self) -> dict:  # pragma: no cover - overridden
        raise NotImplementedError


def _domain_json(dom):
    return [None if math.isinf(x) else x for x in dom]


def _domain_from_json(obj, default):
    if obj is None:
        return default
    lo, hi = obj
    return (-INF if lo is None else float(lo), INF if hi is None else float(hi))


@dataclass(frozen=True)
class Pwl(ScalarFunction):
    """Convex piecewise-linear ``c + slope*t + sum(alpha*(t-beta)_+)``."""

    slope: float
    kinks: tuple = ()
    intercept: float = 0.0
    dom: tuple = REAL_LINE
    kind = "pwl"

    def __post_init__(self):
        kinks = tuple((float(a), float(b)) for a, b in self.kinks)
        if any(a < 0 for a, _ in kinks):
            raise NotAdmissible("Pwl kink weights must be nonnegative")
        object.__setattr__(self, "kinks", kinks)
        object.__setattr__(self, "slope", float(self.slope))
        object.__setattr__(self, "intercept", float(self.intercept))
        object.__setattr__(self, "dom", tuple(float(x) for x in self.dom))

    @property
    def domain(self):
        return self.dom

    def _raw(self, t):
        out = self.intercept + self.slope * t
        for a, b in self.kinks:
            out = out + a * np.maximum(t - b, 0.0)
        return out

    def slope_after(self, x: float) -> float:
        """Right derivative at ``x``."""
        return self.slope + sum(a for a, b in self.kinks if b <= x)

    def slope_before(self, x: float) -> float:
        """Left derivative at ``x``."""
        return self.slope + sum(a for a, b in self.kinks if b < x)

    def __add__(self, other):
        if not isinstance(other, Pwl):
            return NotImplemented
        return Pwl(
            self.slope + other.slope,
            self.kinks + other.kinks,
            self.intercept + other.intercept,
            _intersect(self.dom, other.dom),
        )

    def __mul__(self, c):
        c = float(c)
        if c < 0:
            raise NotAdmissible("Pwl is closed under nonnegative scaling only")
        return Pwl(c * self.slope, tuple((c * a, b) for a, b in self.kinks), c * self.intercept, self.dom)

    __rmul__ = __mul__

    def to_json(self):
        out = {"kind": "pwl", "lambda": self.slope, "kinks": [list(k) for k in self.kinks]}
        if self.intercept:
            out["intercept"] = self.intercept
        if self.dom != REAL_LINE:
            out["domain"] = _domain_json(self.dom)
        return out


@dataclass(frozen=True)
class Power(ScalarFunction):
    p: float
    kind = "power"

    def __post_init__(self):
        if not self.p > 0:
            raise NotAdmissible("Power requires p > 0")
        object.__setattr__(self, "p", float(self.p))

    @property
    def domain(self):
        return HALF_LINE

    def _raw(self, t):
        return np.power(np.maximum(t, 0.0), self.p)

    def to_json(self):
        return {"kind": "power", "p": self.p}


@dataclass(frozen=True)
class AbsoluteValue(ScalarFunction):
    kind = "abs"

    @property
    def domain(self):
        return REAL_LINE

    def _raw(self, t):
        return np.abs(t)

    def to_json(self):
        return {"kind": "abs"}


@dataclass(frozen=True)
class PositivePartShift(ScalarFunction):
    """``t -> (t - beta)_+``."""

    beta: float = 0.0
    kind = "pos"

    @property
    def domain(self):
        return REAL_LINE

    def _raw(self, t):
        return np.maximum(t - self.beta, 0.0)

    def to_json(self):
        return {"kind": "pos", "beta": float(self.beta)}


@dataclass(frozen=True)
class Affine(ScalarFunction):
    a: float = 1.0
    b: float = 0.0
    kind = "affine"

    @property
    def domain(self):
        return REAL_LINE

    def _raw(self, t):
        return self.a * t + self.b

    def to_json(self):
        return {"kind": "affine", "a": float(self.a), "b": float(self.b)}


@dataclass(frozen=True)
class Negate(ScalarFunction):
    f: ScalarFunction
    kind = "neg"

    @property
    def domain(self):
        return self.f.domain

    def _raw(self, t):
        return -self.f._raw(t)

    def to_json(self):
        return {"kind": "neg", "f": self.f.to_json()}


def _is_operator_convex_inner(g: ScalarFunction) -> bool:
    if isinstance(g, Affine):
        return True
    if isinstance(g, Pwl):
        return not g.kinks
    if isinstance(g, Power):
        return 1.0 <= g.p <= 2.0
    if isinstance(g, Negate) and isinstance(g.f, Power):
        return g.f.p <= 1.0
    return False


def _is_nondecreasing_convex_outer(phi: ScalarFunction) -> bool:
    if isinstance(phi, Pwl):
        return phi.slope >= 0
    if isinstance(phi, Power):
        return phi.p >= 1.0
    if isinstance(phi, PositivePartShift):
        return True
    if isinstance(phi, Affine):
        return phi.a >= 0
    return False


@dataclass(frozen=True)
class Compose(ScalarFunction):
    """``outer(inner(t))``: a unitary convex function."""

    outer: ScalarFunction
    inner: ScalarFunction
    kind = "compose"

    def __post_init__(self):
        if not _is_operator_convex_inner(self.inner):
            raise NotAdmissible(f"inner function {self.inner!r} is not in the operator convex whitelist")
        if not _is_nondecreasing_convex_outer(self.outer):
            raise NotAdmissible(f"outer function {self.outer!r} is not nondecreasing convex")

    @property
    def domain(self):
        return self.inner.domain

    def _raw(self, t):
        u = self.inner._raw(t)
        if not np.all(self.outer.in_domain(u)):
            raise OutOfDomain("inner values leave the outer function's domain")
        return self.outer._raw(u)

    def to_json(self):
        return {"kind": "compose", "outer": self.outer.to_json(), "inner": self.inner.to_json()}


@dataclass(frozen=True)
class Psi(ScalarFunction):
    """``t -> 1/f(1/t)`` on ``[0, inf)``, extended by continuity with 0 at 0."""

    f: ScalarFunction
    kind = "psi"

    @property
    def domain(self):
        return HALF_LINE

    def _raw(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        pos = t > 0
        if np.any(pos):
            out[pos] = 1.0 / self.f._raw(1.0 / t[pos])
        return out

    def to_json(self):
        return {"kind": "psi", "f": self.f.to_json()}


def _intersect(d1, d2):
    return (max(d1[0], d2[0]), min(d1[1], d2[1]))


def evaluate(f: ScalarFunction, t: float) -> float:
    return f(t)


def identity() -> Pwl:
    return Pwl(1.0)


def even_pwl(intercept: float, slope: float, kinks) -> Pwl:
    """Even convex ``phi(|t|)`` for ``phi(s) = c + slope*s + sum(alpha*(s-beta)_+)``.

    Needs ``slope >= 0`` and ``beta >= 0``; the result is written back in
    :class:`Pwl` form with kinks mirrored at ``+-beta``.
    """
    if slope < 0 or any(b < 0 or a < 0 for a, b in kinks):
        raise NotAdmissible("even_pwl needs slope >= 0 and kinks with alpha, beta >= 0")
    mirrored = [(2.0 * slope, 0.0)] if slope else []
    shift = 0.0
    lam = -slope
    for a, b in kinks:
        mirrored += [(a, b), (a, -b)]
        shift += a * b
        lam -= a
    return Pwl(lam, tuple(mirrored), intercept - shift)


# ---------------------------------------------------------------------------
# serialization


def function_from_json(obj) -> ScalarFunction:
    try:
        kind = obj["kind"]
        if kind == "pwl":
            return Pwl(
                float(obj["lambda"]),
                tuple(tuple(k) for k in obj.get("kinks", [])),
                float(obj.get("intercept", 0.0)),
                _domain_from_json(obj.get("domain"), REAL_LINE),
            )
        if kind == "power":
            return Power(float(obj["p"]))
        if kind == "abs":
            return AbsoluteValue()
        if kind == "pos":
            return PositivePartShift(float(obj.get("beta", 0.0)))
        if kind == "affine":
            return Affine(float(obj.get("a", 1.0)), float(obj.get("b", 0.0)))
        if kind == "neg":
            return Negate(function_from_json(obj["f"]))
        if kind == "compose":
            return Compose(function_from_json(obj["outer"]), function_from_json(obj["inner"]))
        if kind == "psi":
            return Psi(function_from_json(obj["f"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, NotAdmissible):
            raise
        raise NotAdmissible(f"bad function object {obj!r}: {exc}") from exc
    raise NotAdmissible(f"unknown function kind {obj.get('kind')!r}")


# ---------------------------------------------------------------------------
# profiling


@dataclass(frozen=True)
class FunctionProfile:
    convex: bool
    concave: bool
    nondecreasing: bool
    nonincreasing: bool
    even: bool
    nonnegative: bool
    value_at_zero: Optional[float] = None

    @property
    def monotone(self) -> bool:
        return self.nondecreasing or self.nonincreasing

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _check_interval(f, interval):
    a, b = map(float, interval)
    if not (math.isfinite(a) and math.isfinite(b)) or a > b:
        raise OutOfDomain(f"profile needs a finite interval, got {interval}")
    lo, hi = f.domain
    if a < lo or b > hi:
        raise OutOfDomain(f"interval {interval} leaves the domain {f.domain}")
    return a, b


def _even_on_grid(f, grid, slack) -> bool:
    pts = grid[(grid != 0) & f.in_domain(-grid)]
    if pts.size == 0:
        return False
    return bool(np.all(np.abs(f._raw(pts) - f._raw(-pts)) <= slack))


def _zero_value(f):
    return float(f._raw(np.array(0.0))) if f.in_domain(0.0) else None


def profile(f: ScalarFunction, interval, grid_points: int = DEFAULT_GRID) -> FunctionProfile:
    """Shape flags of ``f`` on a closed interval.

    :class:`Pwl` and :class:`Power` are classified exactly.  Other bodies use
    midpoint convexity over all grid pairs and adjacent differences, with
    slack ``1e-12 * scale``.
    """
    if grid_points < 3:
        raise ValueError("grid_points must be >= 3")
    a, b = _check_interval(f, interval)
    grid = np.linspace(a, b, grid_points)
    values = f._raw(grid)
    slack = 1e-12 * (1.0 + float(np.max(np.abs(values))))
    even = _even_on_grid(f, grid, slack)
    zero = _zero_value(f)

    if isinstance(f, Pwl):
        pts = [a, b] + [beta for _, beta in f.kinks if a <= beta <= b]
        interior = [alpha for alpha, beta in f.kinks if a < beta < b and alpha > 0]
        return FunctionProfile(
            convex=True,
            concave=not interior,
            nondecreasing=f.slope_after(a) >= 0 or a == b,
            nonincreasing=f.slope_before(b) <= 0 or a == b,
            even=even,
            nonnegative=bool(np.min(f._raw(np.array(pts))) >= -slack),
            value_at_zero=zero,
        )
    if isinstance(f, Power):
        return FunctionProfile(
            convex=f.p >= 1.0,
            concave=f.p <= 1.0,
            nondecreasing=True,
            nonincreasing=a == b,
            even=even,
            nonnegative=True,
            value_at_zero=zero,
        )

    i, j = np.triu_indices(grid_points, k=1)
    mid = f._raw((grid[i] + grid[j]) / 2)
    chord = (values[i] + values[j]) / 2
    diffs = np.diff(values)
    return FunctionProfile(
        convex=bool(np.all(mid <= chord + slack)),
        concave=bool(np.all(mid >= chord - slack)),
        nondecreasing=bool(np.all(diffs >= -slack)),
        nonincreasing=bool(np.all(diffs <= slack)),
        even=even,
        nonnegative=bool(np.min(values) >= -slack),
        value_at_zero=zero,
    )


# ---------------------------------------------------------------------------
# transforms


def _tends_to_infinity(f: ScalarFunction) -> bool:
    if isinstance(f, Pwl):
        return f.slope + sum(a for a, _ in f.kinks) > 0
    if isinstance(f, Power):
        return True
    if isinstance(f, Affine):
        return f.a > 0
    ts = 10.0 ** np.arange(0, 9)
    vals = f._raw(ts)
    return bool(np.all(np.diff(vals) > 0) and vals[-1] > 10 * max(vals[0], 1e-300))


def psi_admissible(f: ScalarFunction, grid_points: int = DEFAULT_GRID, upper: float = 10.0) -> bool:
    lo, hi = f.domain
    if lo > 0 or hi < INF:
        return False
    if abs(float(f._raw(np.array(0.0)))) > 1e-12:
        return False
    grid = np.linspace(0.0, upper, grid_points)
    if not np.all(np.diff(f._raw(grid)) > 0):
        return False
    return _tends_to_infinity(f)


def psi_transform(f: ScalarFunction) -> ScalarFunction:
    """``t -> 1/f(1/t)``, an involution on admissible functions."""
    if not psi_admissible(f):
        raise NotAdmissible(f"{f!r} is not a continuous increasing bijection of [0, inf) fixing 0")
    if isinstance(f, Power):
        return Power(f.p)
    if isinstance(f, Pwl) and not f.kinks and f.intercept == 0:
        return Pwl(1.0 / f.slope, (), 0.0, f.dom)
    return Psi(f)


def _segments(f: ScalarFunction):
    """Breakpoints and slopes of a piecewise-linear body.

    Returns ``(breaks, slopes, sign)`` with ``len(slopes) == len(breaks)+1``.
    """
    if isinstance(f, Affine):
        return [], [float(f.a)], f
    if isinstance(f, Pwl):
        breaks = sorted({b for a, b in f.kinks if a > 0})
        slopes = [f.slope_before(breaks[0]) if breaks else f.slope]
        slopes += [f.slope_after(b) for b in breaks]
        return breaks, slopes, f
    if isinstance(f, Negate) and isinstance(f.f, (Pwl, Affine)):
        breaks, slopes, _ = _segments(f.f)
        return breaks, [-s for s in slopes], f
    raise NotInvertible(f"{f!r} has no piecewise-linear segment structure")


def _from_segments(breaks, slopes, x0, y0, dom) -> ScalarFunction:
    """Piecewise-linear function with the given slopes passing through ``(x0, y0)``."""
    steps = np.diff(slopes)
    if np.all(steps >= -1e-15):
        kinks = tuple((max(float(s), 0.0), float(b)) for s, b in zip(steps, breaks) if s > 0)
        g = Pwl(slopes[0], kinks, 0.0, dom)
        return Pwl(slopes[0], kinks, y0 - float(g._raw(np.array(x0))), dom)
    if np.all(steps <= 1e-15):
        kinks = tuple((max(-float(s), 0.0), float(b)) for s, b in zip(steps, breaks) if s < 0)
        g = Pwl(-slopes[0], kinks, 0.0, dom)
        return Negate(Pwl(-slopes[0], kinks, -y0 - float(g._raw(np.array(x0))), dom))
    raise NotInvertible("segments are neither convex nor concave")


def inverse_monotone(f: ScalarFunction, interval=None) -> ScalarFunction:
    """Functional inverse of a strictly increasing function on ``interval``."""
    lo, hi = f.domain if interval is None else map(float, interval)
    if isinstance(f, Power):
        if lo < 0:
            raise NotInvertible("Power is only defined on [0, inf)")
        return Power(1.0 / f.p)
    breaks, slopes, _ = _segments(f)
    keep = [i for i, b in enumerate(breaks) if lo < b < hi]
    if keep:
        first, last = keep[0], keep[-1]
        breaks = breaks[first : last + 1]
        slopes = slopes[first : last + 2]
    else:
        idx = next((i for i, b in enumerate(breaks) if b >= hi), len(breaks))
        breaks, slopes = [], [slopes[idx]]
    if min(slopes) <= 0:
        raise NotInvertible(f"{f!r} is not strictly increasing on [{lo}, {hi}]")
    x0 = lo if math.isfinite(lo) else (breaks[0] if breaks else 0.0)
    y0 = float(f._raw(np.array(x0)))
    ybreaks = [float(f._raw(np.array(b))) for b in breaks]
    img = (
        float(f._raw(np.array(lo))) if math.isfinite(lo) else -INF,
        float(f._raw(np.array(hi))) if math.isfinite(hi) else INF,
    )
    return _from_segments(ybreaks, [1.0 / s for s in slopes], y0, x0, img)
