import json

import numpy as np
import pytest

from hermineq.instances import (
    PWL_SHAPES,
    RNG_ALGORITHM,
    GenConfig,
    Stream,
    gen_contraction,
    gen_expansive,
    gen_hermitian,
    gen_isometric_column,
    gen_matrix,
    gen_monotone_family,
    gen_psd,
    gen_pwl,
    gen_subspace,
    gen_unitary,
)
from hermineq.numerics import dagger, eigvalsh, is_psd, matrix_to_json, singular_values
from hermineq.opcalc import column_defect, contraction_margin, expansive_margin, is_contraction, is_expansive
from hermineq.scalarfn import Pwl, profile

GENERATORS = [gen_hermitian, gen_psd, gen_unitary, gen_contraction, gen_expansive]


class TestStream:
    def test_deterministic(self):
        assert np.array_equal(Stream(5, "a").uniform(size=10), Stream(5, "a").uniform(size=10))

    def test_keys_split_streams(self):
        assert not np.array_equal(Stream(5, "a").uniform(size=4), Stream(5, "b").uniform(size=4))

    def test_uniform_is_53_bit(self):
        u = Stream(1).uniform(size=1000)
        assert np.all((u >= 0) & (u < 1))
        assert np.all(u * 2.0**53 == np.floor(u * 2.0**53))

    def test_integer_range(self):
        rng = Stream(2)
        draws = {rng.integer(0, 3) for _ in range(200)}
        assert draws == {0, 1, 2, 3}


class TestGenConfig:
    def test_json_round_trip(self):
        cfg = GenConfig(7, 3, "psd", {"spectrum": [1.0, 2.0]})
        obj = cfg.to_json()
        assert obj["rng"] == RNG_ALGORITHM
        assert GenConfig.from_json(json.loads(json.dumps(obj))) == cfg

    def test_children_distinct_and_reproducible(self):
        cfg = GenConfig(3, 2)
        seeds = [cfg.child(i).seed for i in range(100)]
        assert len(set(seeds)) == 100
        assert cfg.child(5) == GenConfig(3, 2).child(5)

    def test_with_does_not_mutate(self):
        cfg = GenConfig(1, 2, extra={"k": 1})
        other = cfg.with_(dim=4)
        assert cfg.dim == 2 and other.dim == 4 and other.extra == {"k": 1}


class TestDeterminism:
    @pytest.mark.parametrize("gen", GENERATORS)
    def test_bytes_identical(self, gen):
        cfg = GenConfig(123, 4)
        a, b = gen(cfg), gen(GenConfig(123, 4))
        assert json.dumps(matrix_to_json(a)) == json.dumps(matrix_to_json(b))

    @pytest.mark.parametrize("gen", GENERATORS)
    def test_seed_changes_output(self, gen):
        assert not np.array_equal(gen(GenConfig(1, 3)), gen(GenConfig(2, 3)))

    def test_pwl_deterministic(self):
        for shape in PWL_SHAPES:
            assert gen_pwl(GenConfig(4, 1), shape) == gen_pwl(GenConfig(4, 1), shape)


class TestHermitian:
    def test_hermitian(self):
        a = gen_hermitian(GenConfig(1, 5))
        assert np.max(np.abs(a - dagger(a))) <= 1e-15

    def test_scalar_is_real(self):
        a = gen_hermitian(GenConfig(1, 1))
        assert a.shape == (1, 1) and a[0, 0].imag == 0

    def test_spectral_radius(self):
        for seed in range(200):
            assert np.max(np.abs(eigvalsh(gen_hermitian(GenConfig(seed, 4))))) <= 2.0 + 1e-12

    def test_entry_mean_near_zero(self):
        n, draws = 3, 10_000
        cfg = GenConfig(99, n)
        entries = np.array([gen_hermitian(cfg.child(i))[0, 1] for i in range(draws)])
        for part in (entries.real, entries.imag):
            sigma = part.std() / np.sqrt(draws)
            assert abs(part.mean()) <= 3 * sigma


class TestClassSoundness:
    DRAWS = 10_000

    def test_psd(self):
        cfg = GenConfig(1, 3)
        for i in range(self.DRAWS):
            a = gen_psd(cfg.child(i).with_(dim=1 + i % 5))
            assert is_psd(a)[1] >= -1e-12
            assert eigvalsh(a)[0] == pytest.approx(4.0)

    def test_psd_spectral_range(self):
        a = gen_psd(GenConfig(1, 4, extra={"spectrum": (1.0, 3.0)}))
        w = eigvalsh(a)
        assert w[0] == pytest.approx(3.0) and w[-1] >= 1.0 - 1e-12

    def test_unitary(self):
        cfg = GenConfig(2, 3)
        for i in range(self.DRAWS):
            u = gen_unitary(cfg.child(i).with_(dim=1 + i % 5))
            assert np.linalg.norm(dagger(u) @ u - np.eye(u.shape[0])) <= 1e-10

    def test_unitary_scalar_is_phase(self):
        assert abs(gen_unitary(GenConfig(3, 1))[0, 0]) == pytest.approx(1.0)

    def test_unitary_preserves_singular_values(self):
        cfg = GenConfig(4, 4)
        x, u = gen_hermitian(cfg), gen_unitary(cfg)
        np.testing.assert_allclose(singular_values(u @ x), singular_values(x), atol=1e-12)

    def test_contraction(self):
        cfg = GenConfig(3, 3)
        for i in range(self.DRAWS):
            assert contraction_margin(gen_contraction(cfg.child(i).with_(dim=1 + i % 5))) >= -1e-12

    def test_expansive(self):
        cfg = GenConfig(4, 3)
        for i in range(self.DRAWS):
            assert expansive_margin(gen_expansive(cfg.child(i).with_(dim=1 + i % 5))) >= -1e-10

    def test_identity_in_both_classes(self):
        assert is_contraction(np.eye(2)) and is_expansive(np.eye(2))

    def test_known_expansive_matrix(self):
        z = np.array([[2.0, 1.0], [1.0, 2.0]])
        np.testing.assert_allclose(eigvalsh(dagger(z) @ z), [9.0, 1.0], atol=1e-13)
        assert is_expansive(z)

    def test_columns(self):
        cfg = GenConfig(5, 3)
        for i in range(1000):
            m = 1 + i % 4
            assert column_defect(gen_isometric_column(cfg.child(i), m)) <= 1e-10

    def test_single_column_is_unitary(self):
        (z,) = gen_isometric_column(GenConfig(1, 4), 1)
        np.testing.assert_allclose(dagger(z) @ z, np.eye(4), atol=1e-12)

    def test_subspace(self):
        for d in range(1, 5):
            s = gen_subspace(GenConfig(d, 4), d)
            np.testing.assert_allclose(dagger(s.basis) @ s.basis, np.eye(d), atol=1e-10)


class TestPwl:
    def test_zero_kinks_is_affine(self):
        f = gen_pwl(GenConfig(1, 1, extra={"kinks": 0}), "convex_monotone")
        assert isinstance(f, Pwl) and f.kinks == ()

    @pytest.mark.parametrize("shape", PWL_SHAPES)
    def test_thousand_draws_match_shape(self, shape):
        interval = (0.0, 8.0) if shape == "concave_nonneg" else (-3.0, 4.0)
        for i in range(1000):
            p = profile(gen_pwl(GenConfig(i, 1), shape), interval)
            if shape == "concave_nonneg":
                assert p.concave and p.nonnegative
            else:
                assert p.convex
            if shape == "convex_monotone":
                assert p.monotone
            if shape == "convex_sign0":
                assert p.value_at_zero <= 0 and p.nondecreasing
            if shape == "even_convex":
                assert p.even

    def test_unknown_shape(self):
        with pytest.raises(ValueError):
            gen_pwl(GenConfig(1, 1), "wiggly")


class TestMonotoneFamily:
    def test_single(self):
        z, a_list, f_list = gen_monotone_family(GenConfig(1, 3), 1)
        assert len(a_list) == len(f_list) == 1

    @pytest.mark.parametrize("seed", range(50))
    def test_commuting_psd(self, seed):
        z, a_list, f_list = gen_monotone_family(GenConfig(seed, 1 + seed % 5), 3)
        for a in a_list:
            assert is_psd(a)[0]
            for b in a_list:
                assert np.linalg.norm(a @ b - b @ a) <= 1e-9
        for f in f_list:
            assert profile(f, (0.0, 4.0)).nondecreasing


class TestDispatch:
    @pytest.mark.parametrize("cls", ["hermitian", "psd", "unitary", "contraction", "expansive"])
    def test_known(self, cls):
        assert gen_matrix(GenConfig(1, 3, cls)).shape == (3, 3)

    def test_unknown(self):
        with pytest.raises(ValueError):
            gen_matrix(GenConfig(1, 3, "nilpotent"))
