import math

import numpy as np
import pytest

from hermineq.dominance import (
    eigen_dominates,
    hermitian_real_part,
    ky_fan_dominates,
    thompson_decompose,
    witness_unitary,
)
from hermineq.errors import DimensionMismatch, DominanceFails, NotHermitian
from hermineq.instances import GenConfig, gen_hermitian, gen_monotone_family, gen_psd, gen_unitary
from hermineq.numerics import dagger, eigvalsh, is_psd, is_unitary, singular_values
from hermineq.opcalc import apply_fn, matrix_abs
from hermineq.theorems.contractions import example_2_4
from hermineq.theorems.expansive import EXAMPLE_3_3_CLOSED_FORMS, EXAMPLE_3_3_F, example_3_3

SQRT2 = math.sqrt(2)


def _example_3_3_pair():
    a, z = example_3_3()[1:]
    x = apply_fn(EXAMPLE_3_3_F, dagger(z) @ a @ z)
    y = dagger(z) @ apply_fn(EXAMPLE_3_3_F, a) @ z
    return x, y


def _dominated_pair(seed: int):
    cfg = GenConfig(seed, 1 + seed % 6)
    y = gen_hermitian(cfg)
    return y - gen_psd(cfg), y


class TestEigenDominates:
    def test_reflexive(self):
        x = gen_hermitian(GenConfig(1, 4))
        v = eigen_dominates(x, x)
        assert v.holds and np.allclose(v.per_index_margins, 0)

    def test_diagonal(self):
        v = eigen_dominates(np.diag([1.0, 0.0]), np.diag([2.0, 1.0]))
        assert v.holds
        np.testing.assert_allclose(v.per_index_margins, [1.0, 1.0])
        assert v.witness is None

    def test_fails_on_expansive_counterexample(self):
        x, y = _example_3_3_pair()
        v = eigen_dominates(y, x)
        assert not v.holds
        assert v.failing_indices == [2]
        low_x, low_y = EXAMPLE_3_3_CLOSED_FORMS
        assert v.per_index_margins[1] == pytest.approx(low_x - low_y, abs=1e-12)
        assert v.per_index_margins[1] == pytest.approx(-0.039, abs=5e-4)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            eigen_dominates(np.eye(2), np.eye(3))

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            eigen_dominates([[0, 1], [0, 0]], np.eye(2))

    def test_json(self):
        obj = eigen_dominates(np.diag([1.0, 0.0]), np.diag([2.0, 1.0])).to_json()
        assert obj == {"holds": True, "per_index_margins": [1.0, 1.0]}


class TestWitnessUnitary:
    def test_equal_diagonal(self):
        y = np.diag([3.0, 2.0, 1.0])
        v = witness_unitary(y, y)
        np.testing.assert_allclose(np.abs(v.witness), np.eye(3), atol=1e-12)
        assert v.psd_margin == pytest.approx(0.0, abs=1e-12)

    def test_sorting_permutation(self):
        v = witness_unitary(np.diag([1.0, 0.0]), np.diag([0.0, 2.0]))
        u = v.witness
        np.testing.assert_allclose(np.abs(u), [[0, 1], [1, 0]], atol=1e-12)
        np.testing.assert_allclose(u @ np.diag([0.0, 2.0]) @ dagger(u), np.diag([2.0, 0.0]), atol=1e-12)
        assert v.holds and v.psd_margin is not None

    def test_raises_when_not_dominated(self):
        x, y = _example_3_3_pair()
        with pytest.raises(DominanceFails):
            witness_unitary(y, x)

    @pytest.mark.parametrize("seed", range(200))
    def test_random_dominated_pairs(self, seed):
        x, y = _dominated_pair(seed)
        v = witness_unitary(x, y)
        assert v.holds
        assert is_unitary(v.witness, 1e-9)
        scale = 1 + float(np.max(np.abs(eigvalsh(y))))
        assert is_psd(v.witness @ y @ dagger(v.witness) - x)[1] >= -1e-8 * scale

    @pytest.mark.parametrize("seed", range(50))
    def test_equivalent_to_eigen_dominance(self, seed):
        cfg = GenConfig(seed, 1 + seed % 5)
        x, y = gen_hermitian(cfg), gen_hermitian(cfg.with_(seed=seed + 500))
        if eigen_dominates(x, y).holds:
            assert witness_unitary(x, y).holds
        else:
            with pytest.raises(DominanceFails):
                witness_unitary(x, y)

    def test_json_contains_witness(self):
        obj = witness_unitary(np.diag([1.0, 0.0]), np.diag([2.0, 1.0])).to_json()
        assert "witness" in obj and "psd_margin" in obj


class TestThompson:
    def test_zero_second_summand(self):
        a = gen_hermitian(GenConfig(2, 3))
        u, v, margin = thompson_decompose(a, np.zeros((3, 3)))
        assert is_unitary(u) and is_unitary(v)
        assert margin >= -1e-8

    def test_counterexample_pair_needs_two_unitaries(self):
        a, b = example_2_4()
        abs_sum = matrix_abs(a + b)
        np.testing.assert_allclose(eigvalsh(abs_sum), [SQRT2, SQRT2], atol=1e-12)
        assert not eigen_dominates(abs_sum, matrix_abs(a) + matrix_abs(b)).holds
        u, v, margin = thompson_decompose(a, b)
        assert margin >= -1e-8
        total = u @ matrix_abs(a) @ dagger(u) + v @ matrix_abs(b) @ dagger(v)
        assert is_psd(total - abs_sum)[1] >= -1e-8

    @pytest.mark.parametrize("seed", range(100))
    def test_random_pairs(self, seed):
        cfg = GenConfig(seed, 1 + seed % 6)
        a, b = gen_hermitian(cfg), gen_hermitian(cfg.with_(seed=seed + 1000))
        u, v, margin = thompson_decompose(a, b)
        assert is_unitary(u, 1e-9) and is_unitary(v, 1e-9)
        assert margin >= -1e-8

    @pytest.mark.parametrize("seed", range(10))
    def test_real_part_below_singular_values(self, seed):
        y = GenConfig(seed, 4).stream("y").complex_uniform((4, 4))
        assert np.all(eigvalsh(hermitian_real_part(y)) <= singular_values(y) + 1e-12)


class TestKyFan:
    def test_reflexive(self):
        x = gen_hermitian(GenConfig(3, 3))
        v = ky_fan_dominates(x, x)
        assert v.holds and np.allclose(v.margins, 0)

    def test_flat_below_peaked(self):
        v = ky_fan_dominates(np.eye(2), np.diag([2.0, 0.0]))
        assert v.holds
        np.testing.assert_allclose(v.margins, [1.0, 0.0])

    def test_fails(self):
        assert not ky_fan_dominates(np.diag([2.0, 0.0]), np.diag([1.5, 0.0])).holds

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            ky_fan_dominates(np.eye(2), np.eye(3))

    @pytest.mark.parametrize("seed", range(30))
    def test_unitary_orbit_sum_of_commuting_family(self, seed):
        cfg = GenConfig(seed, 1 + seed % 5)
        _, a_list, _ = gen_monotone_family(cfg, 3)
        us = [gen_unitary(cfg.with_(seed=seed * 10 + i)) for i in range(3)]
        x = sum(u @ a @ dagger(u) for u, a in zip(us, a_list))
        assert ky_fan_dominates(x, sum(a_list)).holds

    @pytest.mark.parametrize("seed", range(30))
    def test_transitive(self, seed):
        cfg = GenConfig(seed, 4)
        z = gen_hermitian(cfg)
        y = z - gen_psd(cfg) / 4 if seed % 2 else 0.5 * z
        x = 0.5 * y
        if ky_fan_dominates(x, y).holds and ky_fan_dominates(y, z).holds:
            v = ky_fan_dominates(x, z)
            assert v.min_margin >= -2e-8
