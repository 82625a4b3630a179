"""Floor quantizer semantics, dither, and the gain/spectrum diagnostics."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaussdim.benchmarks import independent_halfband_pair, white_noise
from gaussdim.quantize import (
    PrecisionOverflowError,
    UnitVarianceRequiredError,
    ZeroVarianceComponentError,
    bussgang_gain,
    dither,
    quantize,
    spectrum_identity_check,
)
from gaussdim.simulate import autocovariance_from_spectrum, sample_paths


def _as_batch(values):
    return np.asarray(values, float).reshape(1, -1, 1)


class TestQuantize:
    @pytest.mark.parametrize(
        "x,m,code,value",
        [
            (1.7, 4, 6, 1.5),
            (-0.3, 2, -1, -0.5),
            (2.0, 5, 10, 2.0),  # exact lattice point
        ],
    )
    def test_examples(self, x, m, code, value):
        q = quantize(_as_batch([x]), m)
        assert q.codes[0, 0, 0] == code
        assert q.values[0, 0, 0] == pytest.approx(value, abs=0)

    @given(
        st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
        st.integers(min_value=1, max_value=1000),
    )
    @settings(max_examples=200, deadline=None)
    def test_sandwich(self, x, m):
        # exact floor semantics in scaled units: code <= m*x < code + 1,
        # which is the sandwich x - 1/m < code/m <= x in real arithmetic
        code = int(quantize(_as_batch([x]), m).codes[0, 0, 0])
        assert code <= m * x < code + 1

    @given(
        st.floats(min_value=-1e4, max_value=1e4, allow_nan=False),
        st.floats(min_value=-1e4, max_value=1e4, allow_nan=False),
        st.integers(min_value=1, max_value=64),
    )
    @settings(max_examples=200, deadline=None)
    def test_monotone(self, x, y, m):
        lo, hi = sorted((x, y))
        q = quantize(_as_batch([lo, hi]), m).codes[0, :, 0]
        assert q[0] <= q[1]

    @given(st.lists(st.floats(min_value=-50, max_value=50, allow_nan=False), min_size=1, max_size=64),
           st.integers(min_value=1, max_value=256))
    @settings(max_examples=100, deadline=None)
    def test_error_range(self, xs, m):
        arr = _as_batch(xs)
        codes = quantize(arr, m).codes
        assert np.array_equal(codes, np.floor(m * arr).astype(np.int64))
        scaled_err = m * arr - codes  # [0, 1); the top end can round to 1.0 for tiny x
        assert (scaled_err >= 0).all() and (scaled_err <= 1.0).all()
        err = arr - codes / m
        assert err.var() <= 1.0 / (4 * m * m) + 1e-15 and 1.0 / (4 * m * m) <= 1.0 / (m * m)

    def test_overflow_guard(self):
        with pytest.raises(PrecisionOverflowError):
            quantize(_as_batch([2.0**53]), 4)

    def test_bad_precision(self):
        with pytest.raises(ValueError):
            quantize(_as_batch([0.0]), 0)


class TestDither:
    @pytest.fixture
    def qbatch(self):
        acov = autocovariance_from_spectrum(white_noise(), 0)
        batch = sample_paths(acov, 1, 200_000, seed=5)
        return batch, quantize(batch, 4)

    def test_uniform_range_and_determinism(self, qbatch):
        _, q = qbatch
        w1 = dither(q, seed=9)
        w2 = dither(q, seed=9)
        assert np.array_equal(w1.values, w2.values)
        assert w1.dither.min() >= 0.0 and w1.dither.max() < 0.25
        assert not np.array_equal(w1.dither, dither(q, seed=10).dither)

    def test_unit_codes_give_uniform(self):
        q = quantize(np.zeros((1, 100_000, 1)), 1)
        w = dither(q, seed=3)
        assert 0.0 <= w.values.min() and w.values.max() < 1.0
        n = w.values.size
        assert abs(w.values.mean() - 0.5) <= 5.0 * np.sqrt(1.0 / 12 / n)

    def test_variance_adds_uniform_term(self, qbatch):
        _, q = qbatch
        w = dither(q, seed=7)
        m = q.m
        n = w.values.size
        gap = w.values.var() - q.values.var() - 1.0 / (12 * m * m)
        # dominant error: empirical cov(z, u); se ~ 2 sqrt(var_z var_u / n)
        se = 2.0 * np.sqrt(q.values.var() / (12 * m * m) / n)
        assert abs(gap) <= 5.0 * se

    def test_mean_offset_bounded(self, qbatch):
        batch, q = qbatch
        w = dither(q, seed=11)
        offset = abs(w.values.mean() - batch.samples.mean())
        assert offset <= 1.0 / q.m + 1.0 / (2 * q.m)

    def test_dither_independent_of_codes(self, qbatch):
        _, q = qbatch
        w = dither(q, seed=13)
        codes = q.codes.ravel().astype(float)
        u = w.dither.ravel()
        r = np.corrcoef(codes, u)[0, 1]
        assert abs(r) <= 5.0 / np.sqrt(codes.size)


@pytest.fixture(scope="module")
def flat_batch():
    acov = autocovariance_from_spectrum(white_noise(), 0)
    return sample_paths(acov, 1, 1_000_000, seed=17)


class TestBussgang:
    def test_bound_at_m100(self, flat_batch):
        rep = bussgang_gain(flat_batch, 100)
        # unit variance: bound = (1/100) sqrt(2/pi) ~ 0.0079788
        assert rep.gain_bound[0] == pytest.approx(np.sqrt(2.0 / np.pi) / 100, rel=1e-2)
        assert abs(1.0 - rep.gain[0]) <= rep.gain_bound[0] + 5.0 * rep.gain_se[0]

    def test_gain_approaches_one(self, flat_batch):
        gaps = [abs(1.0 - bussgang_gain(flat_batch, m).gain[0]) for m in (2, 16, 256)]
        rep2, rep256 = bussgang_gain(flat_batch, 2), bussgang_gain(flat_batch, 256)
        assert gaps[0] <= rep2.gain_bound[0] + 5 * rep2.gain_se[0]
        assert gaps[2] <= rep256.gain_bound[0] + 5 * rep256.gain_se[0]

    def test_ladder_bound_all_m(self, flat_batch):
        for m in (2, 4, 8, 16, 32, 64, 128, 256):
            rep = bussgang_gain(flat_batch, m)
            assert rep.gain_bound_ok and rep.noise_ok

    def test_equal_gains_for_unit_variance_pair(self):
        acov = autocovariance_from_spectrum(independent_halfband_pair(), 0)
        batch = sample_paths(acov, 1, 400_000, seed=19)
        rep = bussgang_gain(batch, 8)
        assert rep.equal_gains_ok is True

    def test_zero_variance_rejected(self):
        with pytest.raises(ZeroVarianceComponentError, match="normalize"):
            bussgang_gain(np.zeros((100, 4, 1)), 4)


@pytest.fixture(scope="module")
def white_batch():
    acov = autocovariance_from_spectrum(white_noise(), 2047)
    return sample_paths(acov, 2048, 128, seed=23)


class TestSpectrumIdentity:
    @pytest.mark.parametrize("m", [1, 8])
    def test_residual_within_5se(self, white_batch, m):
        rep = spectrum_identity_check(white_batch, m)
        assert rep.mean_ok
        assert abs(rep.mean_residual) <= 5.0 * rep.mean_residual_se

    @pytest.mark.parametrize("m", [1, 8])
    def test_noise_mass_bound(self, white_batch, m):
        rep = spectrum_identity_check(white_batch, m)
        assert rep.noise_ok
        assert (rep.noise_mass <= 1.0 / m**2 + 1e-12).all()

    def test_requires_unit_variance(self, white_batch):
        with pytest.raises(UnitVarianceRequiredError):
            spectrum_identity_check(white_batch.samples * 3.0, 8)
