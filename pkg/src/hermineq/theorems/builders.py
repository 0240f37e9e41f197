"""Seeded random instances for every statement id, fed straight into its checker.

``build(statement_id, cfg)`` draws one instance from ``cfg`` (a
:class:`GenConfig` whose ``dim`` is the largest dimension used) and returns
the checker's :class:`CheckReport`.  Every draw goes through one explicit
stream keyed by the statement id, so a given ``cfg`` always produces the
same report.
"""

from __future__ import annotations

from typing import Callable

from hermineq.errors import GenericityFailed, UnknownStatement
from hermineq.instances import (
    GenConfig,
    Stream,
    gen_contraction,
    gen_expansive,
    gen_hermitian,
    gen_isometric_column,
    gen_monotone_family,
    gen_psd,
    gen_pwl,
    gen_subspace,
    gen_unitary,
)
from hermineq.numerics import DEFAULT_TOL, Tolerance, dagger, eigvalsh
from hermineq.scalarfn import PositivePartShift, Power, Pwl
from hermineq.theorems import compressions as comp
from hermineq.theorems import contractions as con
from hermineq.theorems import expansive as exp
from hermineq.theorems import questions as que
from hermineq.theorems.report import STATEMENT_IDS, CheckReport

# largest dimension each statement draws by default (the global cap is cfg.dim)
DIM_CAPS = {
    "thm2_2_column": 5,
    "cor2_3_hp": 5,
    "prop2_5": 5,
    "remark3_1": 2,
    "prop3_2": 5,
    "star_section3": 5,
    "lemma3_4": 5,
    "thm3_5": 5,
    "lemma3_7": 5,
    "prop3_8": 5,
    "thm3_9": 5,
    "prop3_10": 5,
    "prop3_11": 5,
    "prop4_1": 5,
    "question2_6": 4,
    "question3_12": 5,
}

VARIANTS = {"thm3_5": ("concave", "convex"), "prop3_10": ("concave", "convex"), "prop4_1": ("convex", "concave")}


def _dim(sid: str, cfg: GenConfig, rng: Stream) -> int:
    hi = max(1, min(cfg.dim, DIM_CAPS.get(sid, cfg.dim)))
    lo = max(1, min(int(cfg.get("min_dim", 1)), hi))
    return rng.integer(lo, hi)


def _variant(sid: str, cfg: GenConfig, rng: Stream) -> str:
    chosen = cfg.get("variant")
    if chosen is not None:
        return str(chosen)
    options = VARIANTS[sid]
    return options[rng.integer(0, len(options) - 1)]


def _convex_nonneg_zero(rng: Stream) -> Pwl:
    """Convex, nondecreasing, ``f(0) = 0``, nonnegative on ``[0, inf)``."""
    kinks = tuple((rng.uniform(0.0, 1.5), rng.uniform(0.0, 3.0)) for _ in range(rng.integer(0, 3)))
    return Pwl(rng.uniform(0.0, 1.0), kinks, 0.0)


def _psd_expansive(cfg, n, rng):
    return gen_psd(cfg.with_(dim=n), rng), gen_expansive(cfg.with_(dim=n), rng)


def _thm1_1(cfg, rng, tol):
    n = _dim("thm1_1", cfg, rng)
    c = cfg.with_(dim=n)
    d = rng.integer(1, n)
    f = gen_pwl(c, "convex_monotone", rng)
    return comp.check_thm1_1(f, gen_hermitian(c, rng), gen_subspace(c, d, rng), tol)


def _davis(cfg, rng, tol):
    n = _dim("davis_1", cfg, rng)
    c = cfg.with_(dim=n)
    f = Power(rng.uniform(1.0, 2.0))
    return comp.check_davis(f, gen_psd(c, rng), gen_subspace(c, rng.integer(1, n), rng), tol)


def _thm1_2(cfg, rng, tol):
    n = max(cfg.dim, 1)
    d = min(int(cfg.get("d", 2)), n)
    c = cfg.with_(dim=n)
    a = gen_psd(c, rng)
    grid = tuple(float(p) for p in cfg.get("p_grid", comp.DEFAULT_P_GRID))
    last = None
    for _ in range(16):
        try:
            return comp.check_thm1_2(a, gen_subspace(c, d, rng), grid, tol)
        except GenericityFailed as exc:
            last = exc
    raise last


def _thm2_2_contraction(cfg, rng, tol):
    n = _dim("thm2_2_contraction", cfg, rng)
    c = cfg.with_(dim=n, extra={**cfg.extra, "monotone": True})
    f = gen_pwl(c, "convex_sign0", rng)
    return con.check_thm2_2_contraction(f, gen_hermitian(c, rng), gen_contraction(c, rng), tol)


def _column_instance(sid, cfg, rng):
    n = _dim(sid, cfg, rng)
    c = cfg.with_(dim=n)
    m = rng.integer(1, int(cfg.get("m_max", 3)))
    return c, [gen_hermitian(c, rng) for _ in range(m)], gen_isometric_column(c, m, rng)


def _thm2_2_column(cfg, rng, tol):
    c, a_list, z_list = _column_instance("thm2_2_column", cfg, rng)
    f = gen_pwl(c, "convex_monotone", rng)
    return con.check_thm2_2_column(f, a_list, z_list, tol)


def _cor2_3_bk(cfg, rng, tol):
    n = _dim("cor2_3_bk", cfg, rng)
    c = cfg.with_(dim=n, extra={**cfg.extra, "monotone": False})
    f = gen_pwl(c, "convex_sign0", rng)
    return con.check_cor2_3(f, gen_hermitian(c, rng), gen_contraction(c, rng), "bk", tol)


def _cor2_3_hp(cfg, rng, tol):
    c, a_list, z_list = _column_instance("cor2_3_hp", cfg, rng)
    f = gen_pwl(c.with_(extra={**c.extra, "monotone": False}), "convex_sign0", rng)
    return con.check_cor2_3(f, a_list, z_list, "hp", tol)


def _prop2_5(cfg, rng, tol):
    n = _dim("prop2_5", cfg, rng)
    c = cfg.with_(dim=n)
    f = gen_pwl(c, "even_convex", rng)
    return con.check_prop2_5(f, gen_hermitian(c, rng), gen_hermitian(c, rng), tol)


def _statement5(cfg, rng, tol):
    c = cfg.with_(dim=_dim("statement5", cfg, rng))
    return con.check_statement5(gen_hermitian(c, rng), gen_hermitian(c, rng), tol)


def _remark3_1(cfg, rng, tol):
    f = _convex_nonneg_zero(rng)
    return exp.check_remark3_1(f, rng.uniform(0.0, 4.0), rng.uniform(0.0, 4.0), tol)


def _remark3_1_concave(cfg, rng, tol):
    """Falsifier draw: a strictly concave power, for which the trace test must fail."""
    return exp.check_remark3_1(Power(rng.uniform(0.2, 0.9)), rng.uniform(0.0, 4.0), rng.uniform(0.0, 4.0), tol)


def _prop3_2(cfg, rng, tol):
    n = _dim("prop3_2", cfg, rng)
    a, z = _psd_expansive(cfg, n, rng)
    return exp.check_prop3_2(Power(rng.uniform(1.0, 3.0)), a, z, tol)


def _star(cfg, rng, tol):
    n = _dim("star_section3", cfg, rng)
    c = cfg.with_(dim=n, extra={**cfg.extra, "monotone": True})
    f = gen_pwl(c, "convex_sign0", rng)
    a, z = _psd_expansive(cfg, n, rng)
    return exp.check_star_section3(f, a, z, tol)


def _lemma3_4(cfg, rng, tol):
    n = _dim("lemma3_4", cfg, rng)
    a, z = _psd_expansive(cfg, n, rng)
    return exp.check_lemma3_4(a, z, rng.uniform(0.0, 3.0), tol)


def _concave_for(c: GenConfig, rng: Stream, b: float, monotone: bool):
    return gen_pwl(c.with_(extra={**c.extra, "monotone": monotone, "b": b}), "concave_nonneg", rng)


def _zaz_norm(a, z) -> float:
    m = dagger(z) @ a @ z
    return float(eigvalsh((m + dagger(m)) / 2)[0])


def _thm3_5(cfg, rng, tol):
    n = _dim("thm3_5", cfg, rng)
    c = cfg.with_(dim=n)
    variant = _variant("thm3_5", cfg, rng)
    a, z = _psd_expansive(cfg, n, rng)
    if variant == "concave":
        f = _concave_for(c, rng, _zaz_norm(a, z), monotone=rng.uniform() < 0.5)
    else:
        f = gen_pwl(c.with_(extra={**c.extra, "monotone": False}), "convex_sign0", rng)
    return exp.check_thm3_5(f, a, z, variant, tol)


def _lemma3_7(cfg, rng, tol):
    n = _dim("lemma3_7", cfg, rng)
    c = cfg.with_(dim=n)
    m = int(cfg.get("m", 3))
    z, _, fs = gen_monotone_family(c, m, rng)
    return exp.check_lemma3_7(z, fs, [gen_unitary(c, rng) for _ in range(m)], tol)


def _prop3_8(cfg, rng, tol):
    n = _dim("prop3_8", cfg, rng)
    a, z = _psd_expansive(cfg, n, rng)
    return exp.check_prop3_8(_convex_nonneg_zero(rng), a, z, tol)


def _thm3_9(cfg, rng, tol):
    n = _dim("thm3_9", cfg, rng)
    a, z = _psd_expansive(cfg, n, rng)
    return exp.check_thm3_9(_concave_for(cfg.with_(dim=n), rng, _zaz_norm(a, z), True), a, z, tol)


def _prop3_10(cfg, rng, tol):
    n = _dim("prop3_10", cfg, rng)
    variant = _variant("prop3_10", cfg, rng)
    a, z = _psd_expansive(cfg, n, rng)
    if variant == "concave":
        f = _concave_for(cfg.with_(dim=n), rng, _zaz_norm(a, z), True)
    else:
        f = _convex_nonneg_zero(rng)
        f = Pwl(max(f.slope, 0.05), f.kinks, 0.0)
    return exp.check_prop3_10(f, a, z, variant, tol)


def _prop3_11(cfg, rng, tol):
    c = cfg.with_(dim=_dim("prop3_11", cfg, rng))
    return exp.check_prop3_11(Power(rng.uniform(1.0, 2.0)), gen_psd(c, rng), gen_psd(c, rng), tol)


def _prop4_1(cfg, rng, tol):
    c = cfg.with_(dim=_dim("prop4_1", cfg, rng))
    variant = _variant("prop4_1", cfg, rng)
    a, b = gen_psd(c, rng), gen_psd(c, rng)
    if variant == "convex":
        f = PositivePartShift(rng.uniform(0.0, 3.0)) if rng.uniform() < 0.5 else _convex_nonneg_zero(rng)
    else:
        top = float(eigvalsh(a + b)[0])
        f = Power(rng.uniform(0.1, 1.0)) if rng.uniform() < 0.5 else _concave_for(c, rng, top, rng.uniform() < 0.5)
    return exp.check_prop4_1(f, a, b, variant, tol)


def _question2_6(cfg, rng, tol):
    c = cfg.with_(dim=_dim("question2_6", cfg, rng), extra={**cfg.extra, "monotone": False})
    shape = "convex_sign0" if rng.uniform() < 0.5 else "convex_monotone"
    f = gen_pwl(c, shape, rng)
    return que.check_question2_6(f, gen_hermitian(c, rng), gen_hermitian(c, rng), tol)


def _question3_12(cfg, rng, tol):
    n = _dim("question3_12", cfg, rng)
    a, z = _psd_expansive(cfg, n, rng)
    b = max(_zaz_norm(a, z), float(eigvalsh(a)[0]))
    f = _concave_for(cfg.with_(dim=n), rng, b, monotone=rng.uniform() < 0.5)
    return que.check_question3_12(f, a, z, tol)


def _fixed(fn):
    def run(cfg, rng, tol):
        return fn(tol)

    return run


BUILDERS: dict[str, Callable[[GenConfig, Stream, Tolerance], CheckReport]] = {
    "thm1_1": _thm1_1,
    "davis_1": _davis,
    "thm1_2": _thm1_2,
    "thm2_2_contraction": _thm2_2_contraction,
    "thm2_2_column": _thm2_2_column,
    "cor2_3_bk": _cor2_3_bk,
    "cor2_3_hp": _cor2_3_hp,
    "prop2_5": _prop2_5,
    "ex2_4": _fixed(con.repro_example_2_4),
    "remark3_1": _remark3_1,
    "prop3_2": _prop3_2,
    "ex3_3": _fixed(exp.repro_example_3_3),
    "lemma3_4": _lemma3_4,
    "thm3_5": _thm3_5,
    "ex3_6": _fixed(exp.repro_example_3_6),
    "lemma3_7": _lemma3_7,
    "prop3_8": _prop3_8,
    "thm3_9": _thm3_9,
    "prop3_10": _prop3_10,
    "prop3_11": _prop3_11,
    "prop4_1": _prop4_1,
    "star_section3": _star,
    "statement5": _statement5,
    "question2_6": _question2_6,
    "question3_12": _question3_12,
}

# draws used when searching for counterexamples (differ from the theorem suite only for remark3_1)
FALSIFIER_BUILDERS = {**BUILDERS, "remark3_1": _remark3_1_concave}

assert set(BUILDERS) == set(STATEMENT_IDS)


def build(statement_id: str, cfg: GenConfig, tol: Tolerance = DEFAULT_TOL, falsifier: bool = False) -> CheckReport:
    """Draw one instance for ``statement_id`` from ``cfg`` and run its checker."""
    table = FALSIFIER_BUILDERS if falsifier else BUILDERS
    if statement_id not in table:
        raise UnknownStatement(statement_id)
    return table[statement_id](cfg, cfg.stream("build", statement_id), tol)


# ---------------------------------------------------------------------------
# replaying a serialised instance


def _variant_of(i: dict, default: str) -> str:
    return str(i.get("variant", default))


def _one(i: dict, key: str):
    if key in i:
        return i[key]
    return i[f"{key}_list"][0]


REPLAYERS: dict[str, Callable[[dict, Tolerance], CheckReport]] = {
    "thm1_1": lambda i, t: comp.check_thm1_1(i["f"], i["A"], i["S"], t),
    "davis_1": lambda i, t: comp.check_davis(i["f"], i["A"], i["S"], t),
    "thm1_2": lambda i, t: comp.check_thm1_2(i["A"], i["S"], tuple(i.get("p_grid", comp.DEFAULT_P_GRID)), t),
    "thm2_2_contraction": lambda i, t: con.check_thm2_2_contraction(i["f"], i["A"], i["Z"], t),
    "thm2_2_column": lambda i, t: con.check_thm2_2_column(i["f"], i["A_list"], i["Z_list"], t),
    "cor2_3_bk": lambda i, t: con.check_cor2_3(i["f"], _one(i, "A"), _one(i, "Z"), "bk", t),
    "cor2_3_hp": lambda i, t: con.check_cor2_3(i["f"], i["A_list"], i["Z_list"], "hp", t),
    "prop2_5": lambda i, t: con.check_prop2_5(i["f"], i["A"], i["B"], t),
    "ex2_4": lambda i, t: con.repro_example_2_4(t),
    "remark3_1": lambda i, t: exp.check_remark3_1(i["f"], float(i["x"]), float(i["y"]), t),
    "prop3_2": lambda i, t: exp.check_prop3_2(i["f"], i["A"], i["Z"], t),
    "ex3_3": lambda i, t: exp.repro_example_3_3(t),
    "lemma3_4": lambda i, t: exp.check_lemma3_4(i["A"], i["Z"], float(i["beta"]), t),
    "thm3_5": lambda i, t: exp.check_thm3_5(i["f"], i["A"], i["Z"], _variant_of(i, "convex"), t),
    "ex3_6": lambda i, t: exp.repro_example_3_6(t),
    "lemma3_7": lambda i, t: exp.check_lemma3_7(i["Z"], i["f_list"], i["U_list"], t),
    "prop3_8": lambda i, t: exp.check_prop3_8(i["f"], i["A"], i["Z"], t),
    "thm3_9": lambda i, t: exp.check_thm3_9(i["f"], i["A"], i["Z"], t),
    "prop3_10": lambda i, t: exp.check_prop3_10(i["f"], i["A"], i["Z"], _variant_of(i, "concave"), t),
    "prop3_11": lambda i, t: exp.check_prop3_11(i["f"], i["A"], i["B"], t),
    "prop4_1": lambda i, t: exp.check_prop4_1(i["f"], i["A"], i["B"], _variant_of(i, "convex"), t),
    "star_section3": lambda i, t: exp.check_star_section3(i["f"], i["A"], i["Z"], t),
    "statement5": lambda i, t: con.check_statement5(i["A"], i["B"], t),
    "question2_6": lambda i, t: que.check_question2_6(i["f"], i["A"], i["B"], t),
    "question3_12": lambda i, t: que.check_question3_12(i["f"], i["A"], i["Z"], t),
}

assert set(REPLAYERS) == set(STATEMENT_IDS)


def replay(statement_id: str, inputs: dict, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """Run the checker on decoded inputs (the ``instance`` field of a report, after :func:`decode`)."""
    if statement_id not in REPLAYERS:
        raise UnknownStatement(statement_id)
    return REPLAYERS[statement_id](inputs, tol)
