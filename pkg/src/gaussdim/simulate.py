"""Autocovariance synthesis, exact Gaussian path sampling, and Welch cross-spectra.

The sampler draws from the exact finite-dimensional law: the block-Toeplitz
covariance assembled from C(tau) is factored once and applied to independent
standard normals.  Band and line contributions to C(tau) are integrated in
closed form; rational terms are integrated by a dense FFT quadrature whose
resolution grows with tau_max so that long lags stay alias-free.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg
import scipy.signal

from ._rng import derive_rng
from .spectral import FrequencyGrid, SpectralModel, _eval_rational

MAX_DENSE_DIM = 4096
_PATH_CHUNK = 1 << 16


class SymmetryViolationError(ValueError):
    """Synthesized autocovariance came out materially complex."""


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    """Block-Toeplitz covariance could not be factored even after repair."""


class InsufficientDataError(ValueError):
    """Not enough samples for the requested spectral estimate."""


@dataclass(frozen=True)
class AutocovarianceSequence:
    """Lagged covariances C(0..tau_max), each L x L real, plus the process mean."""

    matrices: np.ndarray  # (tau_max + 1, L, L)
    mean: np.ndarray  # (L,)
    fingerprint: str = ""

    @property
    def L(self) -> int:
        return self.matrices.shape[1]

    @property
    def tau_max(self) -> int:
        return self.matrices.shape[0] - 1

    def toeplitz(self, k: int) -> np.ndarray:
        """Dense (k*L) x (k*L) covariance of k consecutive samples, time-major."""
        if k > self.tau_max + 1:
            raise ValueError(f"k={k} exceeds tau_max+1={self.tau_max + 1}")
        c = self.matrices[:k]
        full = np.concatenate([c[:0:-1].transpose(0, 2, 1), c], axis=0)  # lags -(k-1)..k-1
        lag = np.arange(k)[:, None] - np.arange(k)[None, :]
        big = full[lag + k - 1]  # (k, k, L, L), entry [t, s] = C(t - s)
        L = self.L
        sigma = big.transpose(0, 2, 1, 3).reshape(k * L, k * L)
        return 0.5 * (sigma + sigma.T)


def _fingerprint(matrices: np.ndarray, mean: np.ndarray) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(np.round(matrices, 12)).tobytes())
    h.update(np.ascontiguousarray(np.round(mean, 12)).tobytes())
    return h.hexdigest()[:16]


def autocovariance_from_spectrum(
    model: SpectralModel, tau_max: int, quad_n: int | None = None
) -> AutocovarianceSequence:
    """C(tau) = integral of e^{-i 2 pi tau theta} against the spectral distribution.

    Bands and lines integrate in closed form.  Rational terms use a midpoint
    FFT quadrature with at least 8 nodes per lag of tau_max.
    """
    if tau_max < 0:
        raise ValueError("tau_max must be >= 0")
    taus = np.arange(tau_max + 1)
    c = np.zeros((tau_max + 1, model.L, model.L), dtype=complex)

    for b in model.bands:
        weights = np.empty(tau_max + 1, dtype=complex)
        weights[0] = b.hi - b.lo
        if tau_max >= 1:
            t = taus[1:]
            weights[1:] = (np.exp(-2j * np.pi * t * b.lo) - np.exp(-2j * np.pi * t * b.hi)) / (
                2j * np.pi * t
            )
        c += weights[:, None, None] * b.matrix[None, :, :]

    for ln in model.lines:
        c += np.exp(-2j * np.pi * taus * ln.theta)[:, None, None] * ln.power[None, :, :]

    if model.arma_terms:
        n = quad_n or max(4096, 1 << int(np.ceil(np.log2(8 * (tau_max + 1)))))
        grid = FrequencyGrid(n)
        rat = _eval_rational(model, grid.nodes)
        spec = np.fft.fft(rat, axis=0)[: tau_max + 1]
        phase = np.exp(1j * np.pi * taus * (1.0 - 1.0 / n))
        c += phase[:, None, None] * spec / n

    scale = 1.0 + np.abs(c.real).max(initial=0.0)
    imag_max = np.abs(c.imag).max(initial=0.0)
    if imag_max > 1e-10 * scale:
        raise SymmetryViolationError(
            f"autocovariance has imaginary residue {imag_max:.3e}; spectrum violates S(-t)=conj(S(t))"
        )
    mats = c.real.copy()

    c0 = mats[0]
    eig0 = np.linalg.eigvalsh(0.5 * (c0 + c0.T))
    if eig0.min() < -1e-10 * max(1.0, eig0.max()):
        raise SymmetryViolationError(f"C(0) not PSD (min eigenvalue {eig0.min():.3e})")
    sd = np.sqrt(np.maximum(np.diag(c0), 0.0))
    cap = np.outer(sd, sd) * (1.0 + 1e-9) + 1e-12
    if (np.abs(mats) > cap[None, :, :]).any():
        raise SymmetryViolationError("cross-covariance exceeds Cauchy-Schwarz bound")

    return AutocovarianceSequence(mats, np.asarray(model.mean, float), _fingerprint(mats, model.mean))


@dataclass(frozen=True)
class SamplePathBatch:
    """Independent length-k sample paths: samples[r, t, i] is path r, time t, component i."""

    samples: np.ndarray  # (paths, k, L)
    seed: int
    fingerprint: str
    factor_method: str = "cholesky"

    @property
    def paths(self) -> int:
        return self.samples.shape[0]

    @property
    def k(self) -> int:
        return self.samples.shape[1]

    @property
    def L(self) -> int:
        return self.samples.shape[2]


_EXACT_FACTOR_DIM = 512


def _psd_factor(sigma: np.ndarray) -> tuple[np.ndarray, str]:
    """Square factor F with F F^T = sigma.

    Cholesky first.  On failure, small matrices go straight to the exact
    eigenvalue factor so rank-deficient laws (e.g. perfectly correlated
    components) are sampled exactly; large matrices try one cheap jitter
    retry before paying for the eigendecomposition.
    """
    try:
        return scipy.linalg.cholesky(sigma, lower=True, check_finite=False), "cholesky"
    except scipy.linalg.LinAlgError:
        pass
    n = sigma.shape[0]
    if n > _EXACT_FACTOR_DIM:
        jitter = 1e-12 * np.trace(sigma) / n
        if jitter > 0:
            try:
                return (
                    scipy.linalg.cholesky(sigma + jitter * np.eye(n), lower=True, check_finite=False),
                    "cholesky+jitter",
                )
            except scipy.linalg.LinAlgError:
                pass
    eigval, eigvec = np.linalg.eigh(sigma)
    floor = -1e-8 * max(eigval.max(), 1e-300)
    if eigval.min() < floor:
        raise NotPositiveDefiniteError(
            f"covariance is not PSD: smallest pivot/eigenvalue {eigval.min():.6e}"
        )
    return eigvec * np.sqrt(np.clip(eigval, 0.0, None)), "eigh"


def sample_paths(acov: AutocovarianceSequence, k: int, paths: int, seed: int) -> SamplePathBatch:
    """Draw `paths` independent exact-law paths of length k.

    Deterministic given (acov, k, paths, seed); paths are generated in fixed
    chunks with per-chunk sub-streams, so chunk order (and hence parallel
    generation) cannot change the result.
    """
    L = acov.L
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > acov.tau_max + 1:
        raise ValueError(f"k={k} needs tau_max >= {k - 1}, have {acov.tau_max}")
    if k * L > MAX_DENSE_DIM:
        raise ValueError(f"k*L={k * L} exceeds the dense-factorization cap {MAX_DENSE_DIM}")
    sigma = acov.toeplitz(k)
    factor, method = _psd_factor(sigma)
    mu = np.tile(acov.mean, k)
    out = np.empty((paths, k * L))
    for chunk, start in enumerate(range(0, paths, _PATH_CHUNK)):
        stop = min(start + _PATH_CHUNK, paths)
        rng = derive_rng(seed, "gauss-paths", chunk)
        z = rng.standard_normal((stop - start, k * L))
        out[start:stop] = z @ factor.T + mu
    return SamplePathBatch(out.reshape(paths, k, L), seed, acov.fingerprint, method)


@dataclass(frozen=True)
class WelchEstimate:
    """Averaged cross-periodogram matrices on the Welch frequency grid.

    matrices is the path-pooled, eigenvalue-clipped (PSD) estimate;
    per_path keeps the unclipped per-path averages for error bars.
    """

    freqs: np.ndarray  # (nf,) ascending in [-1/2, 1/2)
    matrices: np.ndarray  # (nf, L, L) Hermitian PSD
    per_path: np.ndarray  # (paths, nf, L, L) Hermitian
    nperseg: int
    segments_per_path: int
    window: str

    def integrated_power(self) -> np.ndarray:
        """Per-component integral of the estimated density over [-1/2, 1/2)."""
        return np.einsum("nii->i", self.matrices).real / len(self.freqs)


def welch_psd(
    data,
    nperseg: int = 256,
    window: str = "hann",
    overlap: float = 0.5,
    detrend: str = "constant",
) -> WelchEstimate:
    """Welch matrix-spectrum estimate from a (paths, k, L) array or batch.

    Two-sided density scaling: the estimate integrates to the process power.
    """
    samples = data.samples if isinstance(data, SamplePathBatch) else np.asarray(data, float)
    if samples.ndim == 2:
        samples = samples[:, :, None]
    paths, k, L = samples.shape
    if nperseg > k:
        raise InsufficientDataError(f"segment length {nperseg} exceeds path length {k}")
    noverlap = int(nperseg * overlap)
    step = nperseg - noverlap
    segs_per_path = 1 + (k - nperseg) // step
    if segs_per_path * paths < 2:
        raise InsufficientDataError("need at least 2 segments in total for a Welch average")

    per_path = np.empty((paths, nperseg, L, L), dtype=complex)
    freqs = None
    for i in range(L):
        for j in range(i, L):
            f, pij = scipy.signal.csd(
                samples[:, :, i],
                samples[:, :, j],
                fs=1.0,
                window=window,
                nperseg=nperseg,
                noverlap=noverlap,
                detrend=detrend,
                return_onesided=False,
                scaling="density",
                axis=-1,
            )
            freqs = f
            per_path[:, :, i, j] = pij
            if i != j:
                per_path[:, :, j, i] = pij.conj()

    order = np.argsort(freqs)
    freqs = freqs[order]
    per_path = per_path[:, order]
    pooled = per_path.mean(axis=0)
    pooled = 0.5 * (pooled + pooled.conj().transpose(0, 2, 1))
    eigval, eigvec = np.linalg.eigh(pooled)
    eigval = np.clip(eigval, 0.0, None)
    clipped = np.einsum("nij,nj,nkj->nik", eigvec, eigval, eigvec.conj())
    return WelchEstimate(freqs, clipped, per_path, nperseg, segs_per_path, window)


def export_batch(data, path, fmt: str = "csv", extra_meta: dict | None = None) -> Path:
    """Write samples (row = path, columns time-major) plus a JSON metadata sidecar."""
    if isinstance(data, SamplePathBatch):
        arr, meta = data.samples, {"seed": data.seed, "fingerprint": data.fingerprint}
    else:
        arr, meta = np.asarray(data), {}
    paths, k, L = arr.shape
    flat = arr.reshape(paths, k * L)
    path = Path(path)
    if fmt == "csv":
        header = ",".join(f"t{t}_c{c}" for t in range(k) for c in range(L))
        np.savetxt(path, flat, delimiter=",", header=header, comments="")
    elif fmt == "bin":
        flat.astype(arr.dtype).tofile(path)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    meta.update({"paths": paths, "k": k, "L": L, "dtype": str(arr.dtype), "format": fmt})
    if extra_meta:
        meta.update(extra_meta)
    meta_path = path.with_name(path.name + ".meta.json")
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True))
    return path


def import_batch(path) -> tuple[np.ndarray, dict]:
    """Inverse of export_batch: returns the (paths, k, L) array and its metadata."""
    path = Path(path)
    meta = json.loads(path.with_name(path.name + ".meta.json").read_text())
    shape = (meta["paths"], meta["k"], meta["L"])
    if meta["format"] == "csv":
        flat = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    else:
        flat = np.fromfile(path, dtype=np.dtype(meta["dtype"]))
    return flat.reshape(shape).astype(np.dtype(meta["dtype"])), meta
