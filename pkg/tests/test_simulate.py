"""Seeded generators: streams, marginals, and the frequency dictionary."""

import math

import numpy as np
import pytest

from gtisp.exceptions import ParameterError
from gtisp.families import bernoulli, gaussian, poisson
from gtisp.simulate import (
    STREAM_TEST,
    STREAM_TRAIN,
    STREAM_VALIDATION,
    Ar1Design,
    TwinSineSpec,
    build_dictionary,
    gen_ar1_glm,
    gen_twinsine,
    philox_gen,
    standard_normals,
)


class TestStreams:
    def test_same_address_is_bit_identical(self):
        d = Ar1Design(n=50, p=10, rho=0.5)
        X1, y1, b1 = gen_ar1_glm(d, gaussian(), seed=7)
        X2, y2, b2 = gen_ar1_glm(d, gaussian(), seed=7)
        np.testing.assert_array_equal(X1, X2)
        np.testing.assert_array_equal(y1, y2)
        np.testing.assert_array_equal(b1, b2)

    def test_streams_are_distinct(self):
        d = Ar1Design(n=50, p=10, rho=0.5)
        draws = [
            gen_ar1_glm(d, gaussian(), seed=7, stream=s)[0]
            for s in (STREAM_TRAIN, STREAM_VALIDATION, STREAM_TEST)
        ]
        assert not np.array_equal(draws[0], draws[1])
        assert not np.array_equal(draws[1], draws[2])

    def test_test_stream_unaffected_by_train_regeneration(self):
        # counter-based addressing: drawing train twice cannot shift test
        d = Ar1Design(n=30, p=10, rho=0.5)
        t1 = gen_ar1_glm(d, gaussian(), seed=3, stream=STREAM_TEST)
        gen_ar1_glm(d, gaussian(), seed=3, stream=STREAM_TRAIN)
        t2 = gen_ar1_glm(d, gaussian(), seed=3, stream=STREAM_TEST)
        np.testing.assert_array_equal(t1[0], t2[0])
        np.testing.assert_array_equal(t1[1], t2[1])

    def test_seeds_are_distinct(self):
        d = Ar1Design(n=30, p=10, rho=0.5)
        X1 = gen_ar1_glm(d, gaussian(), seed=1)[0]
        X2 = gen_ar1_glm(d, gaussian(), seed=2)[0]
        assert not np.array_equal(X1, X2)


class TestNormals:
    def test_moments(self):
        z = standard_normals(philox_gen(11, 0), 200_000)
        assert abs(z.mean()) < 0.01
        assert abs(z.var() - 1.0) < 0.02
        assert abs(np.mean(z < 0.0) - 0.5) < 0.01
        # symmetric tails, no clumping from the pairing
        assert abs(np.mean(np.abs(z) > 1.96) - 0.05) < 0.005

    def test_odd_size(self):
        z = standard_normals(philox_gen(11, 0), 7)
        assert z.shape == (7,)


class TestAr1:
    def test_correlation_structure(self):
        d = Ar1Design(n=10_000, p=6, rho=0.9)
        X = gen_ar1_glm(d, gaussian(), seed=5)[0]
        C = np.corrcoef(X.T)
        for j in range(5):
            assert C[j, j + 1] == pytest.approx(0.9, abs=0.05)
        for j in range(4):
            assert C[j, j + 2] == pytest.approx(0.81, abs=0.05)
        assert np.std(X, axis=0) == pytest.approx(np.ones(6), abs=0.05)

    def test_independent_columns_at_rho_zero(self):
        d = Ar1Design(n=10_000, p=5, rho=0.0)
        X = gen_ar1_glm(d, gaussian(), seed=5)[0]
        C = np.corrcoef(X.T)
        off = C[~np.eye(5, dtype=bool)]
        assert np.max(np.abs(off)) < 0.05

    def test_true_pattern(self):
        d = Ar1Design(n=10, p=8, rho=0.5, b=2.5)
        beta = gen_ar1_glm(d, gaussian(), seed=0)[2]
        assert beta[[0, 2, 3]].tolist() == [2.5, 2.5, 2.5]
        assert beta[[1, 4, 5, 6, 7]].tolist() == [0.0] * 5

    def test_bernoulli_and_poisson_support(self):
        d = Ar1Design(n=400, p=6, rho=0.3, b=0.5)
        _, yb, _ = gen_ar1_glm(d, bernoulli(), seed=9)
        assert set(np.unique(yb)) <= {0.0, 1.0}
        assert 0.2 < yb.mean() < 0.8
        X, yp, beta = gen_ar1_glm(d, poisson(), seed=9)
        assert np.all(yp >= 0) and np.all(yp == np.round(yp))
        assert yp.mean() == pytest.approx(np.exp(X @ beta).mean(), rel=0.2)

    def test_gaussian_noise_level(self):
        d = Ar1Design(n=20_000, p=4, rho=0.0, b=0.0, sigma=2.0)
        _, y, _ = gen_ar1_glm(d, gaussian(), seed=4)
        assert y.std() == pytest.approx(2.0, abs=0.05)

    @pytest.mark.parametrize(
        "kw",
        [{"p": 3}, {"rho": 1.0}, {"rho": -1.5}, {"sigma": -1.0}, {"n": 0}],
    )
    def test_design_validation(self, kw):
        with pytest.raises(ParameterError):
            Ar1Design(**{**{"n": 10, "p": 6}, **kw})


class TestTwinSine:
    def test_noiseless_spot_value(self):
        spec = TwinSineSpec(sigma2=0.0)
        t, clean, y = gen_twinsine(spec, seed=0)
        np.testing.assert_array_equal(clean, y)
        assert t[0] == 0.0 and t.size == 100
        expected = 2.0 * math.cos(math.pi / 3) + 3.0 * math.cos(math.pi / 5)
        assert y[0] == pytest.approx(expected, rel=1e-12)

    def test_signal_to_noise(self):
        # nominal power (a1^2 + a2^2)/2; the realized 100-sample power is
        # higher because the 0.002 beat does not complete a cycle
        spec = TwinSineSpec()
        power = 0.5 * (spec.a1**2 + spec.a2**2)
        snr_db = 10.0 * math.log10(power / spec.sigma2)
        assert snr_db == pytest.approx(8.13, abs=0.01)
        _, clean, _ = gen_twinsine(spec, seed=0)
        assert np.mean(clean**2) > power  # constructive overlap here

    def test_noise_is_seeded(self):
        spec = TwinSineSpec()
        _, _, y1 = gen_twinsine(spec, seed=1)
        _, _, y2 = gen_twinsine(spec, seed=1)
        _, _, y3 = gen_twinsine(spec, seed=2)
        np.testing.assert_array_equal(y1, y2)
        assert not np.array_equal(y1, y3)

    def test_custom_times(self):
        spec = TwinSineSpec(sigma2=0.0)
        t, clean, _ = gen_twinsine(spec, seed=0, time_points=[0.5, 1.5])
        np.testing.assert_allclose(clean, spec.clean(np.array([0.5, 1.5])))


class TestDictionary:
    def test_unit_spacing_drops_top_sine(self):
        d = build_dictionary(np.arange(100))
        assert d.X.shape == (100, 499)
        assert d.groups.k == 250
        sizes = [len(b) for b in d.groups.blocks]
        assert sizes[:-1] == [2] * 249 and sizes[-1] == 1
        assert d.kinds[-1] == "cos" and d.freqs[-1] == 0.5

    def test_generic_times_keep_all_atoms(self):
        d = build_dictionary(np.arange(100) + 0.25)
        assert d.X.shape == (100, 500)
        assert all(len(b) == 2 for b in d.groups.blocks)

    def test_groups_pair_equal_frequencies(self):
        d = build_dictionary(np.arange(100))
        for block in d.groups.blocks:
            f = {d.freqs[j] for j in block}
            assert len(f) == 1
        # the two target tones sit on the ladder, one group each
        assert d.group_freqs[124] == pytest.approx(0.25)
        assert d.group_freqs[125] == pytest.approx(0.252)

    def test_evaluate_reproduces_build_matrix(self):
        t = np.arange(100)
        d = build_dictionary(t)
        np.testing.assert_array_equal(d.evaluate(t), d.X)

    def test_evaluate_keeps_column_layout_at_new_times(self):
        d = build_dictionary(np.arange(100))
        M = d.evaluate(np.linspace(0.3, 99.3, 57))
        assert M.shape == (57, 499)  # dropped atom stays dropped
        j = int(np.flatnonzero(d.freqs == 0.25)[0])
        np.testing.assert_allclose(
            M[:, j], np.cos(2 * math.pi * 0.25 * np.linspace(0.3, 99.3, 57))
        )

    def test_parameter_validation(self):
        with pytest.raises(ParameterError):
            build_dictionary(np.arange(10), k_max=0)
        with pytest.raises(ParameterError):
            build_dictionary([1.0])
