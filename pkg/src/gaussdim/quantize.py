"""Uniform floor quantization, subtractive dither, and quantizer-gain diagnostics.

The quantizer maps x to floor(m*x)/m, so the error n = x - floor(m*x)/m always
lies in [0, 1/m).  The diagnostics estimate the linear-regression gain of the
quantized process on its input and check the gain bound, the error-power
bound, and the spectral decomposition identity that ties the quantized
spectrum to the input and error spectra.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rng import derive_rng
from .simulate import SamplePathBatch, welch_psd

_MAX_SAFE_PRODUCT = float(2**53)


class PrecisionOverflowError(OverflowError):
    """m * x would leave the exactly-representable integer range."""


class ZeroVarianceComponentError(ValueError):
    """Gain diagnostics need positive variance; normalize the model first."""


class UnitVarianceRequiredError(ValueError):
    """The spectral identity check applies to unit-variance components only."""


def _extract(data) -> np.ndarray:
    arr = data.samples if isinstance(data, SamplePathBatch) else np.asarray(data, float)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3:
        raise ValueError("expected samples of shape (paths, k, L)")
    return arr


@dataclass(frozen=True)
class QuantizedPathBatch:
    """Integer lattice codes floor(m * x); reconstruction is codes / m."""

    codes: np.ndarray  # (paths, k, L) int64
    m: int
    fingerprint: str = ""

    @property
    def values(self) -> np.ndarray:
        return self.codes / self.m


def quantize(data, m: int) -> QuantizedPathBatch:
    """Component-wise floor quantization with step 1/m."""
    if m < 1 or int(m) != m:
        raise ValueError(f"precision m must be a positive integer, got {m}")
    arr = _extract(data)
    peak = np.abs(arr).max(initial=0.0)
    if peak * m >= _MAX_SAFE_PRODUCT:
        raise PrecisionOverflowError(
            f"|x|*m reaches {peak * m:.3e}; exact floor semantics need |x| < 2^53/m"
        )
    codes = np.floor(m * arr).astype(np.int64)
    fp = data.fingerprint if isinstance(data, SamplePathBatch) else ""
    return QuantizedPathBatch(codes, int(m), fp)


@dataclass(frozen=True)
class DitheredPathBatch:
    """Quantized values plus independent uniform dither on [0, 1/m)."""

    values: np.ndarray  # (paths, k, L)
    dither: np.ndarray  # (paths, k, L)
    m: int
    seed: int


def dither(qbatch: QuantizedPathBatch, seed: int) -> DitheredPathBatch:
    """w = codes/m + u with u i.i.d. uniform on [0, 1/m), independent of codes."""
    rng = derive_rng(seed, "dither", qbatch.m)
    u = rng.uniform(0.0, 1.0 / qbatch.m, size=qbatch.codes.shape)
    return DitheredPathBatch(qbatch.codes / qbatch.m + u, u, qbatch.m, seed)


@dataclass(frozen=True)
class BussgangReport:
    """Quantizer gain estimates and their theoretical bounds, per component.

    gain_bound is (1/m) * sqrt(2 / (pi * sigma^2)); for Gaussian inputs
    |1 - gain| stays below it.  noise_bound = 1/m^2 holds deterministically
    because the error lives on [0, 1/m).
    """

    m: int
    gain: np.ndarray  # (L,)
    gain_se: np.ndarray  # (L,)
    gain_bound: np.ndarray  # (L,)
    noise_var: np.ndarray  # (L,)
    noise_bound: float
    gain_bound_ok: bool
    noise_ok: bool
    equal_gains_ok: bool | None  # None unless all variances are ~1


def bussgang_gain(data, m: int) -> BussgangReport:
    """Monte Carlo estimate of the per-component quantizer gain.

    gain_i = cov(x_i, floor(m x_i)/m) / var(x_i), pooled over all samples;
    the standard error comes from the spread of per-path estimates, which are
    independent by construction.
    """
    x = _extract(data)
    paths, k, L = x.shape
    z = quantize(x, m).values
    mu = x.reshape(-1, L).mean(axis=0)
    zmu = z.reshape(-1, L).mean(axis=0)
    var = ((x - mu) ** 2).reshape(-1, L).mean(axis=0)
    if (var < 1e-12).any():
        bad = int(np.argmin(var))
        raise ZeroVarianceComponentError(
            f"component {bad} has (near-)zero variance; apply normalize_components first"
        )
    per_path = ((x - mu) * (z - zmu)).mean(axis=1) / var  # (paths, L)
    gain = per_path.mean(axis=0)
    if paths > 1:
        gain_se = per_path.std(axis=0, ddof=1) / np.sqrt(paths)
    else:
        gain_se = np.full(L, np.nan)
    bound = np.sqrt(2.0 / (np.pi * var)) / m
    noise = x - z
    noise_var = noise.reshape(-1, L).var(axis=0)
    noise_bound = 1.0 / m**2
    gains_ok = bool(np.all(np.abs(1.0 - gain) <= bound + 5.0 * gain_se))
    noise_ok = bool(np.all(noise_var <= noise_bound * (1.0 + 1e-12)))
    equal_ok = None
    if L > 1 and np.abs(var - 1.0).max() <= 0.05:
        diffs = np.abs(gain[:, None] - gain[None, :])
        tol = 5.0 * np.sqrt(gain_se[:, None] ** 2 + gain_se[None, :] ** 2)
        equal_ok = bool(np.all(diffs <= tol))
    return BussgangReport(int(m), gain, gain_se, bound, noise_var, noise_bound, gains_ok, noise_ok, equal_ok)


@dataclass(frozen=True)
class SpectrumIdentityReport:
    """Residual of quantized-spectrum = (2a-1) * input-spectrum + error-spectrum.

    The residual is the per-node trace of the empirical mismatch; its mean is
    zero in expectation for unit-variance Gaussian inputs at any precision m.
    """

    m: int
    gain: float
    mean_residual: float
    mean_residual_se: float
    max_node_residual: float
    max_node_z: float
    noise_mass: np.ndarray  # (L,) integral of the error spectrum estimate
    noise_mass_bound: float
    mean_ok: bool
    noise_ok: bool


def spectrum_identity_check(data, m: int, nperseg: int = 256) -> SpectrumIdentityReport:
    """Check the spectral decomposition of the quantized process empirically.

    Estimates input, quantized, and error spectra with identical Welch
    settings, forms the per-path residual, and reports its pooled mean with a
    path-based standard error.  Also checks that the error spectrum integrates
    to at most 1/m^2 (a deterministic consequence of the error range).
    """
    x = _extract(data)
    paths, k, L = x.shape
    var = x.reshape(-1, L).var(axis=0)
    if np.abs(var - 1.0).max() > 0.05:
        raise UnitVarianceRequiredError(
            f"component variances {var} are not all ~1; apply normalize_components first"
        )
    z = quantize(x, m).values
    n = x - z
    gain = float(bussgang_gain(x, m).gain.mean())

    wx = welch_psd(x, nperseg=nperseg)
    wz = welch_psd(z, nperseg=nperseg)
    wn = welch_psd(n, nperseg=nperseg)
    resid = wz.per_path - (2.0 * gain - 1.0) * wx.per_path - wn.per_path
    trace = np.einsum("pnii->pn", resid).real / L  # (paths, nf)

    per_path_mean = trace.mean(axis=1)
    mean_resid = float(per_path_mean.mean())
    mean_se = float(per_path_mean.std(ddof=1) / np.sqrt(paths))
    node_mean = trace.mean(axis=0)
    node_se = trace.std(axis=0, ddof=1) / np.sqrt(paths)
    max_idx = int(np.abs(node_mean).argmax())
    max_node = float(np.abs(node_mean)[max_idx])
    max_z = float(np.abs(node_mean[max_idx]) / max(node_se[max_idx], 1e-300))

    noise_mass = wn.integrated_power()
    noise_bound = 1.0 / m**2
    return SpectrumIdentityReport(
        m=int(m),
        gain=gain,
        mean_residual=mean_resid,
        mean_residual_se=mean_se,
        max_node_residual=max_node,
        max_node_z=max_z,
        noise_mass=noise_mass,
        noise_mass_bound=noise_bound,
        mean_ok=bool(abs(mean_resid) <= 5.0 * mean_se),
        noise_ok=bool(np.all(noise_mass <= noise_bound * (1.0 + 1e-9))),
    )
