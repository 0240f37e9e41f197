import math

import numpy as np
import pytest

from hermineq.errors import (
    DimensionMismatch,
    MalformedMatrix,
    NotContraction,
    NotExpansive,
    NotIsometricColumn,
    NotPSD,
    SpectrumOutOfDomain,
)
from hermineq.instances import GenConfig, gen_hermitian, gen_isometric_column, gen_psd, gen_subspace
from hermineq.numerics import dagger, eigvalsh, is_psd, singular_values
from hermineq.opcalc import (
    Subspace,
    apply_fn,
    column_dilation,
    compress,
    dilate_contraction,
    is_contraction,
    is_expansive,
    matrix_abs,
    positive_part_shift,
    psd_power,
    rank,
    require_contraction,
    require_expansive,
    require_isometric_column,
    require_psd,
    support_projection,
)
from hermineq.scalarfn import Affine, PositivePartShift, Power, Pwl

SQRT2 = math.sqrt(2)


class TestApplyFn:
    def test_identity(self):
        a = gen_hermitian(GenConfig(1, 4))
        np.testing.assert_allclose(apply_fn(Affine(), a), a, atol=1e-14)

    def test_kinked_function(self):
        np.testing.assert_allclose(apply_fn(Pwl(1.0, ((1.0, 1.0),)), np.diag([1.5, 0.5])), np.diag([2.0, 0.5]))

    def test_positive_part(self):
        np.testing.assert_allclose(apply_fn(PositivePartShift(0.0), np.diag([1.0, -1.0])), np.diag([1.0, 0.0]))

    def test_out_of_domain(self):
        with pytest.raises(SpectrumOutOfDomain):
            apply_fn(Power(0.5), np.diag([1.0, -1.0]))

    @pytest.mark.parametrize("seed", range(10))
    def test_commutes_and_is_additive(self, seed):
        cfg = GenConfig(seed, 5)
        a = gen_hermitian(cfg)
        f, g = Pwl(0.5, ((1.0, 0.2),), 1.0), Pwl(-1.0, ((2.0, -0.5),))
        fa = apply_fn(f, a)
        assert np.linalg.norm(fa @ a - a @ fa) <= 1e-9 * (1 + np.linalg.norm(a)) ** 2
        h = Pwl(f.slope + g.slope, f.kinks + g.kinks, f.intercept + g.intercept)
        np.testing.assert_allclose(apply_fn(h, a), fa + apply_fn(g, a), atol=1e-9)


class TestCompress:
    def test_full_space(self):
        a = gen_hermitian(GenConfig(2, 3))
        np.testing.assert_allclose(compress(a, Subspace(np.eye(3))), a)

    def test_coordinate_line(self):
        a = gen_hermitian(GenConfig(3, 3))
        np.testing.assert_allclose(compress(a, Subspace.coordinate(3, [0])), a[:1, :1])

    def test_diagonal_line(self):
        s = Subspace.span(np.array([[1.0], [1.0], [0.0]]))
        np.testing.assert_allclose(compress(np.diag([3.0, 2.0, 1.0]), s), [[2.5]], atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            compress(np.eye(2), Subspace(np.eye(3)))

    def test_non_orthonormal_basis_rejected(self):
        with pytest.raises(MalformedMatrix):
            Subspace(np.array([[1.0], [1.0]]))

    @pytest.mark.parametrize("seed", range(10))
    def test_positive_and_unital(self, seed):
        cfg = GenConfig(seed, 5)
        s = gen_subspace(cfg, 1 + seed % 5)
        np.testing.assert_allclose(compress(np.eye(5), s), np.eye(s.dim), atol=1e-12)
        assert is_psd(compress(gen_psd(cfg), s))[0]

    @pytest.mark.parametrize("seed", range(20))
    def test_operator_convex_compression(self, seed):
        # operator convexity of t^2 under compression: (S*AS)^2 <= S*A^2S
        cfg = GenConfig(seed, 5)
        a, s = gen_psd(cfg), gen_subspace(cfg, 1 + seed % 5)
        x = apply_fn(Power(2), compress(a, s))
        y = compress(apply_fn(Power(2), a), s)
        assert is_psd(y - x)[1] >= -1e-8

    @pytest.mark.parametrize("seed", range(10))
    def test_power_compression_inequality(self, seed):
        # (E A^{pr} E)^{1/r} >= E A^p E on the subspace, p, r >= 1
        cfg = GenConfig(seed, 4)
        a, s = gen_psd(cfg), gen_subspace(cfg, 2)
        p, r = 1.5, 2.0 + seed % 3
        lhs = psd_power(compress(psd_power(a, p * r), s), 1 / r)
        rhs = compress(psd_power(a, p), s)
        assert is_psd(lhs - rhs)[1] >= -1e-8


class TestPowersAndParts:
    def test_large_power_does_not_overflow(self):
        a = np.diag([4.0, 1.0])
        out = psd_power(a, 100.0)
        assert np.isfinite(out).all()
        assert out[0, 0] == pytest.approx(4.0**100)

    def test_zero_eigenvalue_root(self):
        np.testing.assert_allclose(psd_power(np.diag([4.0, 0.0]), 0.5), np.diag([2.0, 0.0]))

    def test_psd_power_rejects_indefinite(self):
        with pytest.raises(NotPSD):
            psd_power(np.diag([1.0, -1.0]), 2.0)

    def test_positive_part_of_psd(self):
        a = gen_psd(GenConfig(1, 3))
        np.testing.assert_allclose(positive_part_shift(a, 0.0), a, atol=1e-12)

    def test_positive_part_shifted(self):
        np.testing.assert_allclose(positive_part_shift(np.diag([3.0, 1.0]), 2.0), np.diag([1.0, 0.0]))

    def test_positive_part_of_indefinite_sum(self):
        p = positive_part_shift(np.array([[1.0, 1.0], [1.0, -1.0]]), 0.0)
        np.testing.assert_allclose(eigvalsh(p), [SQRT2, 0.0], atol=1e-14)


class TestAbs:
    def test_psd(self):
        a = gen_psd(GenConfig(1, 3))
        np.testing.assert_allclose(matrix_abs(a), a, atol=1e-12)

    def test_signed_diagonal(self):
        np.testing.assert_allclose(matrix_abs(np.diag([-2.0, 3.0])), np.diag([2.0, 3.0]))

    def test_indefinite_sum(self):
        np.testing.assert_allclose(matrix_abs([[1, 1], [1, -1]]), SQRT2 * np.eye(2), atol=1e-14)

    def test_non_hermitian(self):
        x = GenConfig(2, 3).stream("x").complex_uniform((3, 3))
        np.testing.assert_allclose(eigvalsh(matrix_abs(x)), singular_values(x), atol=1e-12)


class TestSupport:
    def test_invertible(self):
        np.testing.assert_allclose(support_projection(np.diag([2.0, 1.0])), np.eye(2))

    def test_diagonal(self):
        np.testing.assert_allclose(support_projection(np.diag([1.0, 0.0])), np.diag([1.0, 0.0]))

    def test_rank_one(self):
        x = np.array([[1.0], [1j], [0.0]]) / SQRT2
        a = x @ dagger(x)
        q = support_projection(a)
        np.testing.assert_allclose(q, a, atol=1e-14)
        np.testing.assert_allclose(q @ q, q, atol=1e-12)
        assert rank(a) == 1

    def test_rejects_indefinite(self):
        with pytest.raises(NotPSD):
            support_projection(np.diag([1.0, -1.0]))


class TestClasses:
    def test_identity_in_both(self):
        assert is_contraction(np.eye(3)) and is_expansive(np.eye(3))

    def test_expansive_example(self):
        assert require_expansive(np.array([[2.0, 1.0], [1.0, 2.0]])).shape == (2, 2)

    def test_rejects(self):
        with pytest.raises(NotContraction):
            require_contraction(2 * np.eye(2))
        with pytest.raises(NotExpansive):
            require_expansive(0.5 * np.eye(2))
        with pytest.raises(NotPSD):
            require_psd(np.diag([1.0, -1.0]))
        with pytest.raises(NotIsometricColumn):
            require_isometric_column([np.eye(2), np.eye(2)])

    def test_single_block_column_is_unitary(self):
        (z,) = gen_isometric_column(GenConfig(1, 3), 1)
        np.testing.assert_allclose(dagger(z) @ z, np.eye(3), atol=1e-12)

    def test_equal_blocks(self):
        root = np.eye(2) / SQRT2
        assert len(require_isometric_column([root, root])) == 2


class TestDilations:
    def test_identity(self):
        v, _ = dilate_contraction(np.eye(2), np.eye(2))
        np.testing.assert_allclose(v[2:, :2], 0, atol=1e-12)
        np.testing.assert_allclose(v[:2, :2], np.eye(2))

    def test_zero(self):
        v, _ = dilate_contraction(np.zeros((2, 2)), np.eye(2))
        np.testing.assert_allclose(v[2:, :2], np.eye(2), atol=1e-12)

    def test_scalar(self):
        v, at = dilate_contraction([[0.5]], [[2.0]])
        np.testing.assert_allclose(v, [[0.5, 0], [math.sqrt(3) / 2, 0]], atol=1e-15)
        np.testing.assert_allclose(at, np.diag([2.0, 0.0]))
        np.testing.assert_allclose((dagger(v) @ at @ v)[:1, :1], [[0.5]], atol=1e-15)

    @pytest.mark.parametrize("seed", range(5))
    def test_partial_isometry(self, seed):
        from hermineq.instances import gen_contraction

        cfg = GenConfig(seed, 3)
        z, a = gen_contraction(cfg), gen_hermitian(cfg)
        v, at = dilate_contraction(z, a)
        vv = dagger(v) @ v
        np.testing.assert_allclose(vv, np.diag([1, 1, 1, 0, 0, 0]), atol=1e-9)
        np.testing.assert_allclose((dagger(v) @ at @ v)[:3, :3], dagger(z) @ a @ z, atol=1e-12)

    def test_column_dilation(self):
        cfg = GenConfig(4, 3)
        zs = gen_isometric_column(cfg, 2)
        a_list = [gen_hermitian(cfg), gen_hermitian(cfg.with_(seed=5))]
        s, big = column_dilation(zs, a_list)
        direct = sum(dagger(z) @ a @ z for z, a in zip(zs, a_list))
        np.testing.assert_allclose(compress(big, s), direct, atol=1e-12)
