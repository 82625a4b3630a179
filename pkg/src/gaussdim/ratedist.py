"""Gaussian rate-distortion via reverse water-filling over the spectrum.

The rate (nats per time step) at total mean-square distortion D per time step
follows from filling distortion up to a common water level across the
spectral eigenvalues.  The low-distortion slope of the rate against
-(1/2) log D recovers the information dimension rate, giving an independent
semi-analytic cross-check of the spectral rank integral.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimators import DimensionEstimate, _ls_slope
from .simulate import autocovariance_from_spectrum
from .spectral import FrequencyGrid, SpectralModel, eval_spectrum, rank_integral

BISECTION_MAX_ITER = 200
BISECTION_REL_TOL = 1e-12


class WaterfillError(RuntimeError):
    """Water-level bisection failed to bracket or converge."""


@dataclass(frozen=True)
class WaterfillPoint:
    distortion: float
    rate: float
    water_level: float


@dataclass(frozen=True)
class RDCurve:
    points: tuple  # WaterfillPoints, decreasing distortion
    fingerprint: str = ""

    def as_rows(self):
        return [(p.distortion, p.rate, p.water_level) for p in self.points]


def waterfill_rate(model: SpectralModel, distortion: float, grid: FrequencyGrid | None = None) -> WaterfillPoint:
    """Reverse water-filling at total per-time-step distortion D.

    Finds the level w with sum_j min(w, mu_j) * weight = D by bisection and
    returns R = sum_j max(0, (1/2) log(mu_j / w)) * weight.
    """
    if distortion <= 0:
        raise ValueError(f"distortion must be > 0, got {distortion}")
    grid = grid or FrequencyGrid()
    mats = eval_spectrum(model, grid)
    mu = np.linalg.eigvalsh(mats)  # (n, L)
    w8 = grid.weight
    total = float(mu.sum() * w8)
    if distortion >= total:
        return WaterfillPoint(float(distortion), 0.0, float(mu.max(initial=0.0)))

    def dist_at(w):
        return float(np.minimum(w, mu).sum() * w8)

    lo, hi = 0.0, float(mu.max())
    if dist_at(hi) < distortion:
        raise WaterfillError(f"cannot bracket water level in [0, {hi}]")
    w = 0.5 * (lo + hi)
    for _ in range(BISECTION_MAX_ITER):
        w = 0.5 * (lo + hi)
        d = dist_at(w)
        if abs(d - distortion) <= BISECTION_REL_TOL * distortion:
            break
        if d < distortion:
            lo = w
        else:
            hi = w
    else:
        d = dist_at(w)
        if abs(d - distortion) > 1e-6 * distortion:
            raise WaterfillError(
                f"bisection did not converge: bracket [{lo:.3e}, {hi:.3e}], distortion {d:.6e} vs {distortion:.6e}"
            )
    rate = float(np.where(mu > w, 0.5 * np.log(np.maximum(mu, w) / w), 0.0).sum() * w8)
    return WaterfillPoint(float(distortion), rate, float(w))


def rd_curve(model: SpectralModel, d_ladder, grid: FrequencyGrid | None = None) -> RDCurve:
    """Rate-distortion curve at the given distortion ladder (descending)."""
    pts = tuple(waterfill_rate(model, d, grid) for d in d_ladder)
    return RDCurve(pts)


def rd_dimension_estimate(
    model: SpectralModel,
    d_ladder=(1e-2, 1e-4, 1e-6),
    grid: FrequencyGrid | None = None,
    tolerance: float = 0.01,
) -> DimensionEstimate:
    """Dimension from the low-distortion rate slope.

    R(D) ~ -(d/2) log D + const once the water level sits below the smallest
    supported eigenvalue, so the least-squares slope of R against
    -(1/2) log D is the dimension.  Distortions must be decreasing and small
    relative to the total power (a zero-power model short-circuits to 0).
    """
    ladder = tuple(float(d) for d in d_ladder)
    if len(ladder) < 2 or any(d <= 0 for d in ladder) or sorted(ladder, reverse=True) != list(ladder):
        raise ValueError(f"d_ladder must be >= 2 strictly decreasing positive values, got {d_ladder}")
    reference = rank_integral(model, grid).value
    grid = grid or FrequencyGrid()
    mats = eval_spectrum(model, grid)
    total = float(np.linalg.eigvalsh(mats).sum() * grid.weight)
    if total <= 0:
        return DimensionEstimate(
            0.0, "rate-distortion", ladder, 0, 0, 0.0, reference,
            notes="zero total power: rate is identically 0",
        )
    if max(ladder) > total / 4.0:
        raise ValueError(f"d_ladder must stay below total power / 4 = {total / 4.0:.3e}")
    rates = [waterfill_rate(model, d, grid).rate for d in ladder]
    x = -0.5 * np.log(np.asarray(ladder))
    slope, se = _ls_slope(x, rates)
    pairwise = tuple(
        float((rates[i + 1] - rates[i]) / (x[i + 1] - x[i])) for i in range(len(rates) - 1)
    )
    ok = abs(slope - reference) <= tolerance
    return DimensionEstimate(
        float(slope), "rate-distortion", ladder, 0, 0, se, reference,
        within_bounds=bool(-0.1 <= slope <= model.L + 0.1),
        pairwise_slopes=pairwise,
        notes="" if ok else f"|slope - rank integral| = {abs(slope - reference):.4f} > {tolerance}",
    )


def finite_block_rate(model: SpectralModel, k: int, distortion: float) -> float:
    """Finite-block cross-check: water-fill the eigenvalues of the k-step
    block covariance at total distortion k*D, rate per time step.

    Converges to the spectral waterfill_rate as k grows (Toeplitz eigenvalue
    distributions approach the spectrum).
    """
    if distortion <= 0:
        raise ValueError("distortion must be > 0")
    acov = autocovariance_from_spectrum(model, max(k - 1, 0))
    lam = np.linalg.eigvalsh(acov.toeplitz(k))
    lam = np.clip(lam, 0.0, None)
    target = k * distortion
    total = float(lam.sum())
    if target >= total:
        return 0.0
    lo, hi = 0.0, float(lam.max())
    for _ in range(BISECTION_MAX_ITER):
        w = 0.5 * (lo + hi)
        d = float(np.minimum(w, lam).sum())
        if abs(d - target) <= BISECTION_REL_TOL * target:
            break
        if d < target:
            lo = w
        else:
            hi = w
    return float(np.where(lam > w, 0.5 * np.log(np.maximum(lam, w) / w), 0.0).sum() / k)
