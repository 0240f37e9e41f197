"""Seeded, reproducible generators for every hypothesis class.

Random numbers come from the PCG64 bit generator (``numpy.random.PCG64``)
seeded through ``numpy.random.SeedSequence``.  Only raw 64-bit outputs are
consumed; a float draw is ``(x >> 11) * 2**-53``.  Neither step depends on
``numpy.random.Generator`` distribution code, so streams are bit-stable.

Child streams are derived by seed splitting: the stream for ``(seed, key)``
uses ``SeedSequence([seed, *key_words])``, where string keys are turned into
words with ``zlib.crc32``.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from hermineq.numerics import as_matrix, dagger, eigvalsh, polar_unitary
from hermineq.opcalc import Subspace, apply_fn
from hermineq.scalarfn import Negate, Pwl, even_pwl, inverse_monotone

RNG_ALGORITHM = "pcg64-seedsequence-u53"
_U53 = 2.0**-53
_SEED_MASK = (1 << 64) - 1


def _key_words(key) -> list[int]:
    words = []
    for k in key:
        if isinstance(k, str):
            words.append(zlib.crc32(k.encode()))
        else:
            words.append(int(k) & 0xFFFFFFFF)
            words.append((int(k) >> 32) & 0xFFFFFFFF)
    return words


class Stream:
    """Explicit random stream; never shared implicitly."""

    def __init__(self, seed: int, *key):
        ss = np.random.SeedSequence([int(seed) & _SEED_MASK, *_key_words(key)])
        self._bits = np.random.PCG64(ss)

    def uniform(self, lo: float = 0.0, hi: float = 1.0, size=None):
        count = 1 if size is None else int(np.prod(size))
        raw = np.asarray(self._bits.random_raw(count), dtype=np.uint64)
        u = (raw >> np.uint64(11)).astype(np.float64) * _U53
        out = lo + (hi - lo) * u
        return float(out[0]) if size is None else out.reshape(size)

    def integer(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]``."""
        return lo + min(int(self.uniform() * (hi - lo + 1)), hi - lo)

    def complex_uniform(self, shape) -> np.ndarray:
        re = self.uniform(-1.0, 1.0, shape)
        im = self.uniform(-1.0, 1.0, shape)
        return re + 1j * im


@dataclass(frozen=True)
class GenConfig:
    seed: int
    dim: int
    cls: str = "hermitian"
    extra: dict = field(default_factory=dict)

    def stream(self, *key) -> Stream:
        return Stream(self.seed, self.cls, self.dim, *key)

    def with_(self, **changes) -> "GenConfig":
        data = {"seed": self.seed, "dim": self.dim, "cls": self.cls, "extra": dict(self.extra)}
        data.update(changes)
        return GenConfig(**data)

    def child(self, index: int) -> "GenConfig":
        """Config for the ``index``-th instance of a seeded batch."""
        words = np.random.SeedSequence([int(self.seed) & _SEED_MASK, int(index)]).generate_state(2)
        return self.with_(seed=(int(words[0]) << 32) | int(words[1]))

    def get(self, key: str, default: Any = None) -> Any:
        return self.extra.get(key, default)

    def to_json(self) -> dict:
        return {"seed": self.seed, "dim": self.dim, "class": self.cls, "extra": dict(self.extra), "rng": RNG_ALGORITHM}

    @classmethod
    def from_json(cls, obj) -> "GenConfig":
        return cls(int(obj["seed"]), int(obj.get("dim", 3)), obj.get("class", "hermitian"), dict(obj.get("extra", {})))


def _stream(cfg: GenConfig | Stream, *key) -> Stream:
    return cfg if isinstance(cfg, Stream) else cfg.stream(*key)


def _orthonormal_columns(x: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(x)
    d = np.diag(r)
    phases = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1), 1)
    return q * phases


def gen_hermitian(cfg: GenConfig, rng: Stream | None = None) -> np.ndarray:
    """``(X + X*)/2`` from complex uniforms, rescaled to spectral radius ``radius`` (default 2)."""
    rng = rng or _stream(cfg, "hermitian")
    n = cfg.dim
    x = rng.complex_uniform((n, n))
    h = (x + dagger(x)) / 2
    if n == 1:
        h = h.real.astype(np.complex128)
    radius = float(cfg.get("radius", 2.0))
    top = float(np.max(np.abs(eigvalsh(h))))
    if top > 0:
        h = h * (radius * rng.uniform(0.25, 1.0) / top)
    return (h + dagger(h)) / 2


def gen_psd(cfg: GenConfig, rng: Stream | None = None) -> np.ndarray:
    """``X*X`` mapped affinely so its spectrum spans ``[lo, hi]`` (default ``[0, 4]``)."""
    rng = rng or _stream(cfg, "psd")
    n = cfg.dim
    lo, hi = cfg.get("spectrum", (0.0, 4.0))
    x = rng.complex_uniform((n, n))
    if rng.uniform() < float(cfg.get("rank_deficient_prob", 0.0)) and n > 1:
        x[rng.integer(0, n - 1), :] = 0
    p = dagger(x) @ x
    p = (p + dagger(p)) / 2
    top = float(eigvalsh(p)[0])
    if top == 0:
        return lo * np.eye(n, dtype=np.complex128)
    return lo * np.eye(n) + (hi - lo) * p / top


def gen_unitary(cfg: GenConfig, rng: Stream | None = None) -> np.ndarray:
    rng = rng or _stream(cfg, "unitary")
    return _orthonormal_columns(rng.complex_uniform((cfg.dim, cfg.dim)))


def gen_contraction(cfg: GenConfig, rng: Stream | None = None) -> np.ndarray:
    """Random matrix rescaled to operator norm ``u`` with ``u`` uniform in ``[0.3, 1]``."""
    rng = rng or _stream(cfg, "contraction")
    x = rng.complex_uniform((cfg.dim, cfg.dim))
    top = float(np.linalg.svd(x, compute_uv=False)[0])
    target = 1.0 if rng.uniform() < 0.2 else rng.uniform(0.3, 1.0)
    return x * (target / top) if top > 0 else x


def gen_expansive(cfg: GenConfig, rng: Stream | None = None) -> np.ndarray:
    """``Z = W (I + P)`` with ``W`` the polar factor of a random matrix and ``P`` PSD.

    Then ``Z*Z = (I + P)^2 >= I``.
    """
    rng = rng or _stream(cfg, "expansive")
    n = cfg.dim
    w = polar_unitary(rng.complex_uniform((n, n)))
    spread = float(cfg.get("expansion", 2.0))
    p = gen_psd(cfg.with_(extra={"spectrum": (0.0, rng.uniform(0.0, spread))}), rng)
    return w @ (np.eye(n) + p)


def gen_isometric_column(cfg: GenConfig, m: int, rng: Stream | None = None) -> list[np.ndarray]:
    rng = rng or _stream(cfg, "column", m)
    n = cfg.dim
    q = _orthonormal_columns(rng.complex_uniform((m * n, n)))
    return [q[i * n : (i + 1) * n, :] for i in range(m)]


def gen_subspace(cfg: GenConfig, d: int, rng: Stream | None = None) -> Subspace:
    rng = rng or _stream(cfg, "subspace", d)
    return Subspace(_orthonormal_columns(rng.complex_uniform((cfg.dim, d))))


PWL_SHAPES = ("convex_monotone", "convex_sign0", "concave_nonneg", "even_convex")


def _kinks(rng: Stream, count: int, lo: float, hi: float, amax: float = 1.5):
    return tuple((rng.uniform(0.0, amax), rng.uniform(lo, hi)) for _ in range(count))


def gen_pwl(cfg: GenConfig, shape: str, rng: Stream | None = None):
    """Random piecewise-linear function of the requested shape.

    Extra keys: ``kinks`` (count, default random in 0..3), ``monotone``
    (``convex_sign0``/``concave_nonneg``), ``decreasing`` probability for
    ``convex_monotone``, ``b`` (right end of the nonnegativity interval).
    """
    if shape not in PWL_SHAPES:
        raise ValueError(f"unknown pwl shape {shape!r}")
    rng = rng or _stream(cfg, "pwl", shape)
    count = cfg.get("kinks")
    count = rng.integer(0, 3) if count is None else int(count)

    if shape == "convex_monotone":
        kinks = _kinks(rng, count, -2.0, 3.0)
        slope = rng.uniform(0.0, 1.0)
        c = rng.uniform(-1.0, 1.0)
        if rng.uniform() < float(cfg.get("decreasing", 0.25)):
            # f(t) = c - slope*t + sum a*(b - t)_+ rewritten with (t - b)_+ kinks
            shift = sum(a * b for a, b in kinks)
            return Pwl(-slope - sum(a for a, _ in kinks), kinks, c + shift)
        return Pwl(slope, kinks, c)

    if shape == "convex_sign0":
        kinks = _kinks(rng, count, -2.0, 3.0)
        monotone = bool(cfg.get("monotone", True))
        slope = rng.uniform(0.0, 1.0) if monotone else rng.uniform(-1.5, 1.0)
        f = Pwl(slope, kinks)
        f0 = float(f(0.0))
        c = -f0 - (0.0 if rng.uniform() < 0.5 else rng.uniform(0.0, 0.5))
        while Pwl(slope, kinks, c)(0.0) > 0:
            c = float(np.nextafter(c, -np.inf))
        return Pwl(slope, kinks, c)

    if shape == "even_convex":
        kinks = _kinks(rng, count, 0.0, 2.5)
        return even_pwl(rng.uniform(-1.0, 1.0), rng.uniform(0.0, 1.0), kinks)

    # concave_nonneg
    b = float(cfg.get("b", 50.0))
    c = 0.0 if rng.uniform() < 0.5 else rng.uniform(0.0, 1.0)
    if bool(cfg.get("monotone", True)):
        kinks = _kinks(rng, count, 0.0, 6.0)
        # kinks sit at beta >= 0, so base(0) = 0 and base maps [0, inf) onto itself
        base = Pwl(rng.uniform(0.2, 1.5), kinks, 0.0)
        return _shift(inverse_monotone(base, (0.0, float("inf"))), c)
    kinks = _kinks(rng, count, 0.0, b)
    slope = rng.uniform(0.0, 1.5)
    h = Negate(Pwl(-slope, kinks, -c))  # c + slope*t - sum a*(t-beta)_+
    end = float(h(b))
    if end < 0:
        h = Negate(Pwl(-slope, kinks, -c + end))
    return h


def _shift(f, c: float):
    """``f + c`` for the concave inverse bodies produced by :func:`inverse_monotone`."""
    if isinstance(f, Negate):
        inner = f.f
        return Negate(Pwl(inner.slope, inner.kinks, inner.intercept - c, inner.dom))
    return Pwl(f.slope, f.kinks, f.intercept + c, f.dom)


def gen_monotone_family(cfg: GenConfig, m: int, rng: Stream | None = None):
    """PSD ``Z`` with ``A_i = f_i(Z)`` for nondecreasing nonnegative ``f_i``.

    Returns ``(Z, A_list, f_list)``.
    """
    rng = rng or _stream(cfg, "family", m)
    z = gen_psd(cfg, rng)
    fs = []
    for _ in range(m):
        count = rng.integer(0, 3)
        fs.append(Pwl(rng.uniform(0.0, 1.0), _kinks(rng, count, 0.0, 4.0), rng.uniform(0.0, 0.5)))
    return z, [apply_fn(f, z) for f in fs], fs


def gen_matrix(cfg: GenConfig, rng: Stream | None = None) -> np.ndarray:
    """Dispatch on ``cfg.cls``."""
    table = {
        "hermitian": gen_hermitian,
        "psd": gen_psd,
        "unitary": gen_unitary,
        "contraction": gen_contraction,
        "expansive": gen_expansive,
    }
    if cfg.cls not in table:
        raise ValueError(f"no matrix generator for class {cfg.cls!r}")
    return as_matrix(table[cfg.cls](cfg, rng))
