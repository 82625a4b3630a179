"""Discrete entropy estimation and an exact small-block quantized-cell oracle.

plugin_entropy is the empirical route: count occupied lattice cells.  The
oracle route enumerates every cell a small Gaussian block can occupy and
integrates the normal density over each cell with tensor-product
Gauss-Legendre quadrature; the density is analytic inside a cell, so 32 nodes
per axis are far beyond what the tolerances need.  Feasible for blocks of
total dimension k*L <= 3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .simulate import autocovariance_from_spectrum
from .spectral import SpectralModel

TAIL_SIGMAS = 8.0
QUAD_NODES = 32
_BUDGET_NODES = 2.5e9
_CHUNK_TARGET = 3.0e7


class QuadratureFeasibilityError(ValueError):
    """Requested cell enumeration exceeds the quadrature budget."""


class DegenerateCovarianceError(np.linalg.LinAlgError):
    """Singular block covariance beyond removable constants/duplicates."""


@dataclass(frozen=True)
class EntropyEstimate:
    """A block entropy in nats with its method tag and uncertainty.

    For sampled estimates `error` is a standard error; for the quadrature
    oracle it is the unaccounted probability mass (truncation + roundoff).
    """

    value: float
    method: str  # "plug-in" | "miller-madow" | "quadrature-oracle"
    n_samples: int
    error: float
    occupied: int


def plugin_entropy(codes, miller_madow: bool = True) -> EntropyEstimate:
    """Empirical entropy of a multiset of discrete symbols.

    codes: (n,) scalars or (n, d) rows; rows are treated as joint symbols.
    The Miller-Madow correction adds (occupied - 1) / (2n).
    """
    arr = np.asarray(codes)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError("codes must be a nonempty (n,) or (n, d) array")
    n = arr.shape[0]
    _, counts = np.unique(arr, axis=0, return_counts=True)
    p = counts / n
    logp = np.log(p)
    h_plug = float(-(p * logp).sum())
    var_logp = float((p * logp**2).sum() - h_plug**2)
    se = np.sqrt(max(var_logp, 0.0) / n)
    occupied = len(counts)
    if miller_madow:
        return EntropyEstimate(h_plug + (occupied - 1) / (2.0 * n), "miller-madow", n, se, occupied)
    return EntropyEstimate(h_plug, "plug-in", n, se, occupied)


def _reduce_degenerate(mu: np.ndarray, cov: np.ndarray, m: int):
    """Split coordinates into kept / constant / exact-duplicate groups.

    Constants quantize to a single deterministic code; an exact duplicate
    (same mean, zero difference variance) always lands in its partner's cell.
    Anything else that leaves the covariance singular has no box-preserving
    reduction and raises.
    """
    d = len(mu)
    var = np.diag(cov).copy()
    scale = max(var.max(initial=0.0), 1.0)
    plan = [None] * d  # ("keep", new_idx) | ("const", code) | ("dup", kept_original)
    kept: list[int] = []
    for i in range(d):
        if var[i] <= 1e-14 * scale:
            plan[i] = ("const", int(np.floor(m * mu[i])))
            continue
        dup_of = None
        for j in kept:
            diff_var = var[i] + var[j] - 2.0 * cov[i, j]
            if diff_var <= 1e-12 * (var[i] + var[j]) and abs(mu[i] - mu[j]) <= 1e-9 * (1.0 + abs(mu[i])):
                dup_of = j
                break
        if dup_of is not None:
            plan[i] = ("dup", dup_of)
        else:
            plan[i] = ("keep", len(kept))
            kept.append(i)
    idx = np.asarray(kept, dtype=int)
    return plan, mu[idx], cov[np.ix_(idx, idx)]


def _axis_cells(mu: np.ndarray, cov: np.ndarray, m: int):
    sd = np.sqrt(np.diag(cov))
    los = np.floor(m * (mu - TAIL_SIGMAS * sd)).astype(np.int64)
    his = np.ceil(m * (mu + TAIL_SIGMAS * sd)).astype(np.int64)
    return los, his


def _gl_nodes(lo: int, hi: int, m: int):
    """Gauss-Legendre nodes/weights for every cell [z/m, (z+1)/m), z in [lo, hi)."""
    xs, ws = np.polynomial.legendre.leggauss(QUAD_NODES)
    z = np.arange(lo, hi)
    nodes = (z[:, None] + 0.5 * (xs[None, :] + 1.0)) / m
    return z, nodes, ws / (2.0 * m)


def _cell_probability_grid(mu: np.ndarray, cov: np.ndarray, m: int) -> tuple[list, np.ndarray]:
    """Per-cell probabilities for a nondegenerate Gaussian of dimension <= 3."""
    d = len(mu)
    eig = np.linalg.eigvalsh(cov)
    if eig.min() <= 1e-10 * max(eig.max(), 1e-300):
        raise DegenerateCovarianceError(
            "block covariance is singular beyond removable constants/duplicates; "
            f"smallest eigenvalue {eig.min():.3e}"
        )
    prec = np.linalg.inv(cov)
    lognorm = -0.5 * (d * np.log(2.0 * np.pi) + np.log(np.linalg.det(cov)))
    los, his = _axis_cells(mu, cov, m)
    counts = his - los
    total_nodes = float(np.prod(counts * QUAD_NODES))
    if total_nodes > _BUDGET_NODES:
        raise QuadratureFeasibilityError(
            f"cell enumeration needs ~{total_nodes:.2e} density evaluations; reduce m or the block size"
        )
    axes = [_gl_nodes(los[i], his[i], m) for i in range(d)]

    if d == 1:
        z, nodes, w = axes[0]
        u = nodes - mu[0]
        dens = np.exp(lognorm - 0.5 * prec[0, 0] * u * u)
        probs = dens @ w
        return [z], probs

    if d == 2:
        (z1, n1, w1), (z2, n2, w2) = axes
        u = (n1 - mu[0]).ravel()
        v = (n2 - mu[1]).ravel()
        q = (
            prec[0, 0] * u[:, None] ** 2
            + 2.0 * prec[0, 1] * u[:, None] * v[None, :]
            + prec[1, 1] * v[None, :] ** 2
        )
        dens = np.exp(lognorm - 0.5 * q)
        dens = dens.reshape(len(z1), QUAD_NODES, len(z2), QUAD_NODES)
        probs = np.einsum("aqbr,q,r->ab", dens, w1, w2)
        return [z1, z2], probs

    (z1, n1, w1), (z2, n2, w2), (z3, n3, w3) = axes
    v = (n2 - mu[1]).ravel()
    t = (n3 - mu[2]).ravel()
    inner = (
        prec[1, 1] * v[:, None] ** 2
        + 2.0 * prec[1, 2] * v[:, None] * t[None, :]
        + prec[2, 2] * t[None, :] ** 2
    )
    cross_v = 2.0 * prec[0, 1] * v
    cross_t = 2.0 * prec[0, 2] * t
    probs = np.empty((len(z1), len(z2), len(z3)))
    chunk = max(1, int(_CHUNK_TARGET / max(inner.size * QUAD_NODES, 1)))
    for start in range(0, len(z1), chunk):
        stop = min(start + chunk, len(z1))
        u = (n1[start:stop] - mu[0]).ravel()
        q = (
            (prec[0, 0] * u * u)[:, None, None]
            + u[:, None, None] * (cross_v[None, :, None] + cross_t[None, None, :])
            + inner[None, :, :]
        )
        dens = np.exp(lognorm - 0.5 * q)
        dens = dens.reshape(stop - start, QUAD_NODES, len(z2), QUAD_NODES, len(z3), QUAD_NODES)
        probs[start:stop] = np.einsum("aqbrcs,q,r,s->abc", dens, w1, w2, w3)
    return [z1, z2, z3], probs


@dataclass(frozen=True)
class CellDistribution:
    """Exact lattice-cell distribution of a quantized Gaussian block.

    codes are in the full (k*L)-dimensional space, time-major, matching the
    row layout of quantized sample paths reshaped to (n, k*L).
    """

    codes: np.ndarray  # (ncells, k*L) int64
    probs: np.ndarray  # (ncells,)
    mass_deficit: float
    m: int


def _block_moments(model: SpectralModel, k: int, mean_shift=None):
    acov = autocovariance_from_spectrum(model, max(k - 1, 0))
    cov = acov.toeplitz(k)
    mu = np.tile(acov.mean, k)
    if mean_shift is not None:
        shift = np.asarray(mean_shift, float)
        if shift.shape == (model.L,):
            shift = np.tile(shift, k)
        if shift.shape != (k * model.L,):
            raise ValueError("mean_shift must have shape (L,) or (k*L,)")
        mu = mu + shift
    return mu, cov


def exact_cell_distribution(model: SpectralModel, k: int, m: int, mean_shift=None) -> CellDistribution:
    """Quadrature cell probabilities for a k-step block of the process.

    Requires k * L <= 3.  Constant and exactly duplicated coordinates are
    folded out before the quadrature and reinstated in the returned codes.
    """
    if k * model.L > 3:
        raise QuadratureFeasibilityError(f"k*L = {k * model.L} exceeds the quadrature limit 3")
    mu, cov = _block_moments(model, k, mean_shift)
    plan, mu_r, cov_r = _reduce_degenerate(mu, cov, m)
    d_red = len(mu_r)
    if d_red == 0:
        codes = np.array([[code for kind, code in plan]], dtype=np.int64)
        return CellDistribution(codes, np.array([1.0]), 0.0, int(m))
    axes, probs = _cell_probability_grid(mu_r, cov_r, m)
    flat = probs.reshape(-1)
    keepmask = flat > 0.0
    flat = flat[keepmask]
    grids = np.meshgrid(*axes, indexing="ij")
    reduced_codes = np.stack([g.reshape(-1)[keepmask] for g in grids], axis=1)
    full = np.empty((len(flat), len(plan)), dtype=np.int64)
    for i, (kind, val) in enumerate(plan):
        if kind == "keep":
            full[:, i] = reduced_codes[:, val]
        elif kind == "dup":
            kept_kind, kept_val = plan[val]
            full[:, i] = reduced_codes[:, kept_val]
        else:
            full[:, i] = val
    deficit = abs(1.0 - float(flat.sum()))
    return CellDistribution(full, flat, deficit, int(m))


def exact_cell_entropy(model: SpectralModel, k: int, m: int, mean_shift=None) -> EntropyEstimate:
    """Exact entropy of the quantized k-block by cell-probability quadrature."""
    dist = exact_cell_distribution(model, k, m, mean_shift)
    p = dist.probs[dist.probs > 0]
    h = float(-(p * np.log(p)).sum())
    return EntropyEstimate(h, "quadrature-oracle", 0, dist.mass_deficit, len(p))
