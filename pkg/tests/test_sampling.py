"""Path-sampling tests: determinism, truncation, structure, Monte Carlo covariances."""

import math

import numpy as np
import pytest

from hinfgp.kernels import CozineParams, StationarySequence, cozine_kernel, geometric_kernel
from hinfgp.sampling import (
    SampledPath,
    abs_sum,
    eval_path,
    sample_cozine,
    sample_cozine_batch,
    sample_stationary,
    sample_stationary_batch,
)


class TestStationarySampling:
    def test_path_shape_and_origin(self):
        path = sample_stationary(StationarySequence.geometric(0.5), trunc=50, seed=3)
        assert path.impulse_coeffs.shape == (51,)  # n = 0..trunc inclusive
        assert np.all(np.isfinite(path.impulse_coeffs))
        assert "geometric" in path.origin
        assert path.seed == 3

    def test_same_seed_reproduces(self):
        seq = StationarySequence.geometric(0.3)
        a = sample_stationary(seq, trunc=30, seed=11)
        b = sample_stationary(seq, trunc=30, seed=11)
        np.testing.assert_array_equal(a.impulse_coeffs, b.impulse_coeffs)

    def test_different_seeds_differ(self):
        seq = StationarySequence.geometric(0.3)
        a = sample_stationary(seq, trunc=30, seed=1)
        b = sample_stationary(seq, trunc=30, seed=2)
        assert not np.array_equal(a.impulse_coeffs, b.impulse_coeffs)

    def test_amplitude_envelope(self):
        """Each draw is a_n w_n, so across many paths var(h(n)) = a_n^2."""
        seq = StationarySequence.geometric(0.25)
        mat = sample_stationary_batch(seq, trunc=6, seed=29, count=20000)
        sample_var = np.var(mat, axis=0, ddof=1)
        expected = 0.25 ** np.arange(7)
        np.testing.assert_allclose(sample_var, expected, rtol=0.08)

    def test_batch_count_zero(self):
        mat = sample_stationary_batch(StationarySequence.geometric(0.5), 10, 0, 0)
        assert mat.shape[0] == 0

    def test_explicit_sequence_truncates_at_list_end(self):
        seq = StationarySequence.explicit([1.0, 0.25])
        path = sample_stationary(seq, trunc=8, seed=0)
        # a_n = 0 beyond the stored list, so the tail draws are exactly zero
        np.testing.assert_array_equal(path.impulse_coeffs[2:], np.zeros(7))

    def test_monte_carlo_covariance_matches_kernel(self):
        """E[f(z) f(w)*] over draws matches the geometric closed form (4 SE)."""
        seq = StationarySequence.geometric(0.5)
        kernel = geometric_kernel(0.5)
        mat = sample_stationary_batch(seq, trunc=120, seed=101, count=20000)
        n = np.arange(mat.shape[1])
        z, w = 2.0 + 0j, 2.0 * np.exp(1j * math.pi / 3.0)
        f_z = mat @ z ** (-n.astype(float))
        f_w = mat @ w ** (-n.astype(float))
        prods = f_z * np.conj(f_w)
        target = complex(kernel.hermitian_eval(z, w))
        for part, want in ((prods.real, target.real), (prods.imag, target.imag)):
            se = np.std(part, ddof=1) / math.sqrt(part.size)
            assert abs(np.mean(part) - want) <= 4.0 * se


class TestCozineSampling:
    def test_resonance_recurrence(self):
        """h obeys the second-order recurrence h(n) = 2 a cos(w0) h(n-1) - a^2 h(n-2)."""
        params = CozineParams(0.8, 1.3)
        path = sample_cozine(params, seed=17)
        h = path.impulse_coeffs
        assert h.size > 10
        c = 2.0 * params.a * math.cos(params.omega0)
        for n in range(2, h.size):
            assert h[n] == pytest.approx(c * h[n - 1] - params.a**2 * h[n - 2], abs=1e-12)

    def test_damped_envelope(self):
        params = CozineParams(0.6, 0.9)
        path = sample_cozine(params, seed=5)
        h = path.impulse_coeffs
        x = h[0]
        y = (h[1] / params.a - x * math.cos(params.omega0)) / math.sin(params.omega0)
        envelope = math.hypot(x, y) * params.a ** np.arange(h.size)
        assert np.all(np.abs(h) <= envelope * (1.0 + 1e-9))

    def test_truncation_tail_is_negligible(self):
        path = sample_cozine(CozineParams(0.5, 1.0), seed=9)
        h = path.impulse_coeffs
        x = h[0]
        y = (h[1] / 0.5 - x * math.cos(1.0)) / math.sin(1.0)
        assert 0.5 ** (h.size) * math.hypot(x, y) < 1e-11

    def test_batch_common_truncation(self):
        mat = sample_cozine_batch(CozineParams(0.7, 2.0), seed=3, count=5)
        assert mat.ndim == 2 and mat.shape[0] == 5
        single_cols = {sample_cozine(CozineParams(0.7, 2.0), seed=s).impulse_coeffs.size for s in range(3)}
        # batch pads all rows to one shared truncation length
        assert mat.shape[1] >= min(single_cols)

    def test_batch_count_zero(self):
        mat = sample_cozine_batch(CozineParams(0.5, 1.0), seed=0, count=0)
        assert mat.shape[0] == 0

    def test_monte_carlo_covariance_matches_kernel(self):
        params = CozineParams(0.5, math.pi / 2.0)
        kernel = cozine_kernel(params)
        mat = sample_cozine_batch(params, seed=211, count=20000)
        n = np.arange(mat.shape[1])
        z, w = 2.0 + 0j, 1.5 * np.exp(-0.7j)
        f_z = mat @ z ** (-n.astype(float))
        f_w = mat @ w ** (-n.astype(float))
        for prods, target in (
            (f_z * np.conj(f_w), complex(kernel.hermitian_eval(z, w))),
            (f_z * f_w, complex(kernel.complementary_eval(z, w))),
        ):
            for part, want in ((prods.real, target.real), (prods.imag, target.imag)):
                se = np.std(part, ddof=1) / math.sqrt(part.size)
                assert abs(np.mean(part) - want) <= 4.0 * se


class TestPathEvaluation:
    def _path(self, coeffs):
        return SampledPath(np.asarray(coeffs, dtype=float), "explicit-test", 0)

    def test_polynomial_value(self):
        path = self._path([1.0, 0.5, 0.25])
        z = 2.0
        expected = 1.0 + 0.5 / z + 0.25 / z**2
        assert complex(eval_path(path, z)) == pytest.approx(expected, abs=1e-15)

    def test_rejects_interior_point(self):
        with pytest.raises(ValueError, match=r"\|z\| >= 1"):
            eval_path(self._path([1.0, 0.5]), 0.5)

    def test_warns_on_circle_with_fat_tail(self):
        # undecayed coefficients make the boundary value untrustworthy
        path = self._path(np.ones(20))
        with pytest.warns(RuntimeWarning, match="tail"):
            eval_path(path, np.exp(0.3j))

    def test_no_warning_well_inside_domain(self):
        import warnings

        path = self._path(np.ones(20))
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            eval_path(path, 3.0)

    def test_abs_sum(self):
        assert abs_sum(self._path([1.0, -2.0, 0.5])) == pytest.approx(3.5, abs=1e-15)

    def test_validation(self):
        with pytest.raises(ValueError):
            SampledPath(np.array([1.0, np.nan]), "bad", 0)
        with pytest.raises(ValueError):
            SampledPath(np.array([]), "empty", 0)
        with pytest.raises(ValueError):
            SampledPath(np.ones((2, 2)), "matrix", 0)


class TestSummabilityOracle:
    def test_geometric_expected_abs_sum(self):
        """E sum |h| = sqrt(2/pi) sum a_n: half-normal mean of each unit draw."""
        seq = StationarySequence.geometric(0.25)
        mat = sample_stationary_batch(seq, trunc=200, seed=77, count=4000)
        sums = np.sum(np.abs(mat), axis=1)
        se = np.std(sums, ddof=1) / math.sqrt(sums.size)
        assert abs(np.mean(sums) - 1.5957691216057307) <= 3.0 * se
