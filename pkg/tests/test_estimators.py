"""Entropy-slope and Gaussian-surrogate dimension estimators, the KL check,
and the scale/translation invariance runs."""

import numpy as np
import pytest

from gaussdim.benchmarks import (
    ar1,
    correlated_pair,
    narrowband,
    white_noise,
    zero_process,
)
from gaussdim.estimators import (
    UndersamplingError,
    gaussian_surrogate_kl,
    idr_slope_estimate,
    invariance_check,
    kl_cap_per_coordinate,
    surrogate_idr_estimate,
)


class TestSlopeEstimator:
    def test_iid_standard_normal(self):
        est = idr_slope_estimate(white_noise(), paths=200_000, seed=1)
        assert est.reference == pytest.approx(1.0)
        assert abs(est.value - 1.0) <= 0.05
        assert est.k == 1 and est.within_bounds

    def test_constant_process(self):
        est = idr_slope_estimate(zero_process(), paths=10_000, seed=2)
        assert est.value == 0.0
        assert "zero variance" in est.notes

    def test_fully_correlated_pair_gives_one_not_two(self):
        est = idr_slope_estimate(correlated_pair(), paths=200_000, seed=3)
        assert abs(est.value - 1.0) <= 0.05
        assert est.reference == pytest.approx(1.0)

    def test_undersampling_guard_raises(self):
        with pytest.raises(UndersamplingError, match="occupied"):
            idr_slope_estimate(white_noise(), k=3, paths=5_000, seed=4)

    def test_guard_drives_k_selection(self):
        small = idr_slope_estimate(white_noise(), paths=20_000, seed=5)
        assert small.k == 1  # occupied(k=2) ~ 400^2 >> paths/10

    def test_ladder_widening_stays_consistent(self):
        narrow = idr_slope_estimate(white_noise(), m_ladder=(8, 16, 32), paths=150_000, seed=6)
        wide = idr_slope_estimate(white_noise(), m_ladder=(8, 16, 32, 64), paths=150_000, seed=6)
        ref = narrow.reference
        assert abs(wide.value - ref) <= abs(narrow.value - ref) + 2.0 * (narrow.se + wide.se)

    def test_ladder_spread_reported(self):
        est = idr_slope_estimate(white_noise(), paths=100_000, seed=7)
        assert len(est.pairwise_slopes) == 3
        assert est.ladder_spread < 0.1


class TestSurrogateEstimator:
    def test_white_noise(self):
        est = surrogate_idr_estimate(white_noise(), paths=60, k=2048, seed=8)
        assert abs(est.value - 1.0) <= 0.05

    def test_half_band(self):
        est = surrogate_idr_estimate(narrowband(0.5), paths=60, k=2048, seed=9)
        assert abs(est.value - 0.5) <= 0.05
        assert est.reference == pytest.approx(0.5)

    def test_zero_process_dither_only(self):
        est = surrogate_idr_estimate(zero_process(), paths=40, k=2048, seed=10)
        assert est.value == pytest.approx(0.0, abs=1e-12)

    def test_dither_only_slope_is_minus_dimension(self):
        """Quantizing an exactly-zero signal leaves only dither: the half
        log-det integral must fall like -log(12 m^2)/2 per component."""
        from gaussdim.quantize import dither, quantize
        from gaussdim.simulate import welch_psd
        from gaussdim.estimators import _half_mean_logdet

        for m in (16, 64):
            w = dither(quantize(np.zeros((40, 2048, 1)), m), seed=11)
            est = welch_psd(w.values, nperseg=1024)
            g = _half_mean_logdet(est.matrices, 0.01 / (12 * m * m))
            assert g == pytest.approx(-0.5 * np.log(12.0 * m * m), abs=0.02)

    def test_group_se_positive(self):
        est = surrogate_idr_estimate(white_noise(), paths=40, k=2048, seed=12, groups=8)
        assert est.se >= 0.0 and np.isfinite(est.se)

    def test_bivariate_k_capped(self):
        est = surrogate_idr_estimate(correlated_pair(), paths=40, k=4096, seed=13)
        assert est.k == 2048  # k*L stays within the dense-factorization cap
        assert abs(est.value - 1.0) <= 0.05

    def test_spectral_line_contributes_no_dimension(self):
        """A random sinusoid has positive power but its spectral distribution
        only jumps; the surrogate must land near 0, matching the rank route."""
        from gaussdim.benchmarks import line_process

        est = surrogate_idr_estimate(line_process(theta=0.125, power=0.5), paths=60, k=2048, seed=20)
        assert est.reference == 0.0
        assert abs(est.value) <= 0.05


class TestKLCheck:
    def test_constant_value(self):
        k = kl_cap_per_coordinate()
        assert k == pytest.approx(0.5 * np.log(2 * np.pi * (1 + 1 / 12)) + 37.5 + 24 / np.pi, abs=1e-12)

    @pytest.mark.parametrize("m", [1, 2, 4, 8])
    def test_within_bound_block1(self, m):
        rep = gaussian_surrogate_kl(white_noise(), 1, m)
        assert rep.passed and rep.kl <= rep.bound
        assert rep.kl >= 0.0
        assert rep.mass_deficit < 1e-12

    def test_block2_bound_doubles(self):
        rep = gaussian_surrogate_kl(ar1(0.6), 2, 4)
        assert rep.bound == pytest.approx(2.0 * kl_cap_per_coordinate())
        assert rep.passed

    def test_kl_decreases_with_precision(self):
        vals = [gaussian_surrogate_kl(white_noise(), 1, m).kl for m in (1, 2, 4, 8)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_closed_form_matches_brute_force_integral(self):
        """The per-cell closed-form KL against a dense numerical integration
        of f log(f/phi) over the piecewise-constant dithered density."""
        from gaussdim.entropy import exact_cell_distribution

        m = 2
        dist = exact_cell_distribution(white_noise(), 1, m)
        z, p = dist.codes[:, 0], dist.probs
        centers = z / m + 0.5 / m
        mu_w = float((p * centers).sum())
        var_w = float((p * (centers - mu_w) ** 2).sum()) + 1.0 / (12 * m * m)
        w = np.linspace(-12, 12, 600_001)
        lookup = dict(zip(z.tolist(), p.tolist()))
        f = np.array([m * lookup.get(c, 0.0) for c in np.floor(m * w).astype(int)])
        phi = np.exp(-0.5 * (w - mu_w) ** 2 / var_w) / np.sqrt(2 * np.pi * var_w)
        mask = f > 0
        kl_brute = float(np.trapezoid(f[mask] * np.log(f[mask] / phi[mask]), w[mask]))
        rep = gaussian_surrogate_kl(white_noise(), 1, m)
        assert rep.kl == pytest.approx(kl_brute, abs=1e-9)

    def test_multivariate_rejected(self):
        with pytest.raises(ValueError, match="univariate"):
            gaussian_surrogate_kl(correlated_pair(), 1, 2)

    def test_block_length_limited(self):
        with pytest.raises(ValueError, match="block_len"):
            gaussian_surrogate_kl(white_noise(), 3, 2)


class TestInvariance:
    def test_scale_by_three(self):
        rep = invariance_check(white_noise(), "scale", 3.0, paths=150_000, seed=14)
        assert rep.delta <= 0.05

    def test_translate_by_ten(self):
        rep = invariance_check(white_noise(), "translate", 10.0, paths=150_000, seed=15)
        assert rep.delta <= 0.05
        assert rep.exact_ok is True
        assert rep.exact_entropy_bound == pytest.approx(np.log(4.0))

    def test_translate_off_lattice_exact_bound(self):
        rep = invariance_check(
            white_noise(), "translate", 0.3, paths=50_000, seed=16, exact_block=(1, 4)
        )
        assert rep.exact_entropy_delta is not None
        assert rep.exact_entropy_delta <= rep.exact_entropy_bound

    def test_narrowband_invariance(self):
        rep = invariance_check(narrowband(0.4), "scale", 2.0, paths=100_000, seed=17)
        # base and transformed share paths, so the gap is purely quantizer-level
        assert rep.delta <= 0.05

    def test_negative_scale_rejected(self):
        with pytest.raises(ValueError, match="positive"):
            invariance_check(white_noise(), "scale", -1.0, paths=1000, seed=18)

    def test_unknown_transform_rejected(self):
        with pytest.raises(ValueError, match="transform"):
            invariance_check(white_noise(), "rotate", 1.0, paths=1000, seed=19)
