"""Autocovariance synthesis, exact-law sampling, and Welch spectrum estimates."""

import numpy as np
import pytest

from gaussdim.benchmarks import (
    ar1,
    correlated_pair,
    line_process,
    narrowband,
    proper_complex_flat,
    white_noise,
)
from gaussdim.entropy import exact_cell_distribution
from gaussdim.quantize import dither, quantize
from gaussdim.simulate import (
    InsufficientDataError,
    SymmetryViolationError,
    autocovariance_from_spectrum,
    export_batch,
    import_batch,
    sample_paths,
    welch_psd,
)
from gaussdim.spectral import Band, SpectralModel


class TestAutocovariance:
    def test_white_noise(self):
        acov = autocovariance_from_spectrum(white_noise(), 4)
        assert acov.matrices[0, 0, 0] == pytest.approx(1.0, abs=1e-12)
        assert np.abs(acov.matrices[1:]).max() < 1e-12

    def test_band_closed_form(self):
        # height 2 on [-1/4, 1/4): C(1) = 2 sin(pi/2) / pi = 2/pi
        model = SpectralModel(L=1, bands=[Band(-0.25, 0.25, [[2.0]])])
        acov = autocovariance_from_spectrum(model, 3)
        assert acov.matrices[0, 0, 0] == pytest.approx(1.0, abs=1e-12)
        assert acov.matrices[1, 0, 0] == pytest.approx(2.0 / np.pi, abs=1e-12)
        assert acov.matrices[2, 0, 0] == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize(
        "builder", [white_noise, lambda: narrowband(0.4), correlated_pair, line_process, lambda: ar1(0.6)]
    )
    def test_lag_zero_equals_total_power(self, builder, grid):
        from gaussdim.spectral import component_variances

        model = builder()
        acov = autocovariance_from_spectrum(model, 2)
        assert np.allclose(np.diag(acov.matrices[0]), component_variances(model, grid), atol=1e-10)

    def test_ar1_geometric_decay(self):
        acov = autocovariance_from_spectrum(ar1(0.6), 8)
        assert np.allclose(acov.matrices[:, 0, 0], 0.6 ** np.arange(9), atol=1e-10)

    def test_line_cosine_covariance(self):
        acov = autocovariance_from_spectrum(line_process(theta=0.125, power=0.5), 8)
        expected = np.cos(2 * np.pi * 0.125 * np.arange(9))
        assert np.allclose(acov.matrices[:, 0, 0], expected, atol=1e-12)

    def test_asymmetric_spectrum_raises(self):
        bad = SpectralModel(
            L=1, bands=[Band(0.1, 0.3, [[1.0]])], validate=False
        )  # no mirrored band
        with pytest.raises(SymmetryViolationError):
            autocovariance_from_spectrum(bad, 4)


class TestSamplePaths:
    def test_determinism(self):
        acov = autocovariance_from_spectrum(white_noise(), 0)
        a = sample_paths(acov, 1, 5000, seed=42)
        b = sample_paths(acov, 1, 5000, seed=42)
        assert np.array_equal(a.samples, b.samples)
        c = sample_paths(acov, 1, 5000, seed=43)
        assert not np.array_equal(a.samples, c.samples)

    def test_standard_normal_moments(self):
        acov = autocovariance_from_spectrum(white_noise(), 0)
        batch = sample_paths(acov, 1, 100_000, seed=7)
        n = batch.samples.size
        assert abs(batch.samples.mean()) <= 5.0 / np.sqrt(n)
        assert abs(batch.samples.var() - 1.0) <= 5.0 * np.sqrt(2.0 / n)

    def test_correlated_pair_exactly_equal(self):
        acov = autocovariance_from_spectrum(correlated_pair(), 0)
        batch = sample_paths(acov, 1, 2000, seed=3)
        assert np.array_equal(batch.samples[:, 0, 0], batch.samples[:, 0, 1])
        assert batch.factor_method == "eigh"

    def test_lag_one_autocorrelation(self):
        model = narrowband(0.5)
        acov = autocovariance_from_spectrum(model, 7)
        batch = sample_paths(acov, 8, 30_000, seed=11)
        x = batch.samples[:, :, 0]
        emp = (x[:, 1:] * x[:, :-1]).mean()
        se = (x[:, 1:] * x[:, :-1]).std() / np.sqrt(x[:, 1:].size)
        assert abs(emp - acov.matrices[1, 0, 0]) <= 5.0 * se * 3  # lag products correlate within paths

    def test_batch_mean_matches_model(self):
        model = SpectralModel(L=1, bands=[Band(-0.5, 0.5, [[1.0]])], mean=[2.5])
        acov = autocovariance_from_spectrum(model, 0)
        batch = sample_paths(acov, 1, 50_000, seed=5)
        assert abs(batch.samples.mean() - 2.5) <= 5.0 / np.sqrt(batch.samples.size)

    def test_lag_zero_sample_covariance(self):
        acov = autocovariance_from_spectrum(correlated_pair(), 0)
        batch = sample_paths(acov, 1, 100_000, seed=29)
        x = batch.samples[:, 0, :]
        emp = np.cov(x, rowvar=False)
        se = np.sqrt(2.0 / len(x))  # var-of-variance scale for unit-variance entries
        assert np.abs(emp - acov.matrices[0]).max() <= 5.0 * se

    def test_k_limited_by_tau_max(self):
        acov = autocovariance_from_spectrum(white_noise(), 3)
        with pytest.raises(ValueError, match="tau_max"):
            sample_paths(acov, 5, 10, seed=1)

    def test_dense_cap(self):
        acov = autocovariance_from_spectrum(correlated_pair(), 4000)
        with pytest.raises(ValueError, match="cap"):
            sample_paths(acov, 3000, 2, seed=1)

    def test_indefinite_covariance_names_smallest_pivot(self):
        from gaussdim.simulate import NotPositiveDefiniteError, _psd_factor

        bad = np.array([[1.0, 2.0], [2.0, 1.0]])  # eigenvalues 3 and -1
        with pytest.raises(NotPositiveDefiniteError, match="-1"):
            _psd_factor(bad)

    def test_quantized_cells_match_quadrature_oracle(self):
        """Sampled quantized-cell frequencies against exact cell probabilities."""
        model = ar1(0.6)
        k, m, paths = 2, 2, 200_000
        dist = exact_cell_distribution(model, k, m)
        acov = autocovariance_from_spectrum(model, k - 1)
        batch = sample_paths(acov, k, paths, seed=31)
        codes = quantize(batch, m).codes.reshape(paths, -1)
        top = np.argsort(dist.probs)[::-1][:40]
        lookup = {tuple(dist.codes[i]): dist.probs[i] for i in top}
        uniq, counts = np.unique(codes, axis=0, return_counts=True)
        freq = {tuple(row): cnt / paths for row, cnt in zip(uniq, counts)}
        for code, p in lookup.items():
            se = np.sqrt(p * (1 - p) / paths)
            assert abs(freq.get(code, 0.0) - p) <= 5.0 * se


class TestWelch:
    def test_white_noise_flat_within_5se(self):
        acov = autocovariance_from_spectrum(white_noise(), 2047)
        batch = sample_paths(acov, 2048, 100, seed=11)
        est = welch_psd(batch, nperseg=256)
        vals = est.matrices[:, 0, 0].real
        per_path = est.per_path[:, :, 0, 0].real
        se = per_path.std(axis=0, ddof=1) / np.sqrt(batch.paths)
        # detrending wipes the mean: skip DC and its two window-width neighbors
        keep = np.abs(est.freqs) > 1.6 / 256
        z = np.abs(vals - 1.0) / se
        assert z[keep].max() <= 5.0

    def test_integrated_power_roundtrip(self):
        model = narrowband(0.5)
        acov = autocovariance_from_spectrum(model, 2047)
        batch = sample_paths(acov, 2048, 80, seed=13)
        est = welch_psd(batch, nperseg=256)
        per_path_power = est.per_path[:, :, 0, 0].real.mean(axis=1)
        se = per_path_power.std(ddof=1) / np.sqrt(batch.paths)
        assert abs(est.integrated_power()[0] - 1.0) <= 5.0 * se

    def test_out_of_band_leakage_bounded(self):
        model = SpectralModel(L=1, bands=[Band(-0.25, 0.25, [[2.0]])])
        acov = autocovariance_from_spectrum(model, 2047)
        batch = sample_paths(acov, 2048, 60, seed=17)
        est = welch_psd(batch, nperseg=256)
        inband = np.abs(est.freqs) < 0.25 - 4.0 / 256
        outband = np.abs(est.freqs) > 0.25 + 4.0 / 256
        assert est.matrices[inband, 0, 0].real.mean() == pytest.approx(2.0, rel=0.05)
        # 4+ bins past the edge, Hann leakage sits far below the passband level
        assert est.matrices[outband, 0, 0].real.max() < 2.0 * 1e-2

    def test_dither_only_floor(self):
        m = 4
        codes = quantize(np.zeros((60, 2048, 1)), m)
        w = dither(codes, seed=23)
        est = welch_psd(w.values, nperseg=256)
        level = 1.0 / (12.0 * m * m)
        per_path = est.per_path[:, :, 0, 0].real.mean(axis=1)
        se = per_path.std(ddof=1) / np.sqrt(60)
        assert abs(est.integrated_power()[0] - level) <= 5.0 * se

    def test_cross_spectrum_orientation(self):
        """The estimated cross density reproduces the sign of the built-in
        imaginary cross term on positive frequencies."""
        model = proper_complex_flat()
        acov = autocovariance_from_spectrum(model, 2047)
        batch = sample_paths(acov, 2048, 60, seed=19)
        est = welch_psd(batch, nperseg=256)
        pos = (est.freqs > 0.05) & (est.freqs < 0.2)
        neg = (est.freqs < -0.05) & (est.freqs > -0.2)
        assert est.matrices[pos, 0, 1].imag.mean() == pytest.approx(1.0, abs=0.1)
        assert est.matrices[neg, 0, 1].imag.mean() == pytest.approx(-1.0, abs=0.1)

    def test_insufficient_segments(self):
        with pytest.raises(InsufficientDataError):
            welch_psd(np.zeros((1, 100, 1)), nperseg=256)

    def test_psd_clipping(self):
        rng = np.random.default_rng(3)
        est = welch_psd(rng.normal(size=(8, 512, 2)), nperseg=128)
        eig = np.linalg.eigvalsh(est.matrices)
        assert eig.min() >= -1e-15


class TestExport:
    def test_csv_roundtrip(self, tmp_path):
        acov = autocovariance_from_spectrum(correlated_pair(), 3)
        batch = sample_paths(acov, 4, 25, seed=2)
        p = export_batch(batch, tmp_path / "batch.csv", fmt="csv")
        back, meta = import_batch(p)
        assert np.allclose(back, batch.samples)
        assert meta["seed"] == 2 and meta["k"] == 4 and meta["L"] == 2

    def test_binary_roundtrip(self, tmp_path):
        acov = autocovariance_from_spectrum(white_noise(), 0)
        batch = sample_paths(acov, 1, 100, seed=9)
        p = export_batch(batch, tmp_path / "batch.bin", fmt="bin", extra_meta={"m": 8})
        back, meta = import_batch(p)
        assert np.array_equal(back, batch.samples)
        assert meta["m"] == 8 and meta["fingerprint"] == batch.fingerprint
