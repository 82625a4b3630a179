"""Dimension-rate estimators: block-entropy slope, Gaussian-surrogate slope,
the dithered-quantization KL check, and scale/translation invariance runs.

Both estimators extract the dimension as the slope of a quantity against
log m over a precision ladder: block entropies grow like d * log m + const,
and the additive constant (which decays only like 1/log m in a ratio) drops
out of the slope.  The surrogate route replaces cell counting with the
log-determinant of the spectrum of the dithered quantized process, which is
what makes narrowband processes reachable at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entropy import exact_cell_distribution, exact_cell_entropy, plugin_entropy
from .quantize import dither, quantize
from .simulate import autocovariance_from_spectrum, sample_paths, welch_psd
from .spectral import FrequencyGrid, SpectralModel, normalize_components, rank_integral

DEFAULT_M_LADDER = (8, 16, 32, 64)
SURROGATE_M_LADDER = (16, 64, 256)
OCCUPANCY_FRACTION = 0.1
K_CAP = 4


class UndersamplingError(ValueError):
    """Occupied-cell count too close to the sample count for a plug-in estimate."""


def _ls_slope(x, y, y_se=None):
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    xc = x - x.mean()
    denom = float((xc**2).sum())
    coeff = xc / denom
    slope = float(coeff @ y)
    if y_se is None:
        resid = y - (y.mean() + slope * xc)
        dof = max(len(x) - 2, 1)
        se = float(np.sqrt((resid**2).sum() / dof / denom))
    else:
        se = float(np.sqrt((coeff**2 * np.asarray(y_se, float) ** 2).sum()))
    return slope, se


@dataclass(frozen=True)
class DimensionEstimate:
    """A dimension-rate estimate with its settings and theoretical reference."""

    value: float
    method: str
    m_ladder: tuple
    k: int
    paths: int
    se: float
    reference: float | None = None
    within_bounds: bool = True
    pairwise_slopes: tuple = ()  # consecutive two-point slopes (ladder-spread proxy)
    notes: str = ""

    @property
    def ladder_spread(self) -> float:
        if len(self.pairwise_slopes) < 2:
            return 0.0
        return float(max(self.pairwise_slopes) - min(self.pairwise_slopes))


def _validate_ladder(m_ladder) -> tuple:
    ladder = tuple(int(m) for m in m_ladder)
    if len(ladder) < 2 or any(m < 1 for m in ladder) or sorted(set(ladder)) != list(ladder):
        raise ValueError(f"m_ladder must be >= 2 strictly increasing positive ints, got {m_ladder}")
    return ladder


def _block_entropies(samples: np.ndarray, k: int, m_ladder, paths: int, miller_madow: bool):
    """Per-m block entropy rate H_k/k from one k-block per path."""
    values, ses = [], []
    blocks = samples[:, :k, :].reshape(paths, -1)
    for m in m_ladder:
        codes = quantize(blocks[:, :, None], m).codes.reshape(paths, -1)
        est = plugin_entropy(codes, miller_madow=miller_madow)
        if est.occupied > paths * OCCUPANCY_FRACTION:
            raise UndersamplingError(
                f"{est.occupied} occupied cells at m={m} with only {paths} blocks; "
                "reduce k or the top of the m ladder"
            )
        values.append(est.value / k)
        ses.append(est.error / k)
    return np.asarray(values), np.asarray(ses)


def _choose_k(samples: np.ndarray, m_max: int, paths: int, k_cap: int) -> int:
    """Largest block length whose occupied-cell count passes the plug-in guard."""
    chosen = 1
    for k in range(1, k_cap + 1):
        codes = quantize(samples[:, :k, :], m_max).codes.reshape(paths, -1)
        occupied = len(np.unique(codes, axis=0))
        if occupied > paths * OCCUPANCY_FRACTION:
            break
        chosen = k
    return chosen


def _slope_from_samples(samples: np.ndarray, m_ladder, k: int, miller_madow: bool):
    paths = samples.shape[0]
    values, ses = _block_entropies(samples, k, m_ladder, paths, miller_madow)
    logm = np.log(np.asarray(m_ladder, float))
    slope, se = _ls_slope(logm, values, ses)
    pairwise = tuple(
        float((values[i + 1] - values[i]) / (logm[i + 1] - logm[i])) for i in range(len(values) - 1)
    )
    return slope, se, pairwise


def idr_slope_estimate(
    model: SpectralModel,
    m_ladder=DEFAULT_M_LADDER,
    k: int | None = None,
    paths: int = 100_000,
    seed: int = 0,
    k_cap: int = K_CAP,
    miller_madow: bool = True,
    grid: FrequencyGrid | None = None,
) -> DimensionEstimate:
    """Dimension from the slope of block entropy rates against log m.

    Samples `paths` independent k-blocks, counts quantized cells per ladder
    precision, and fits the entropy-rate slope by least squares.  k defaults
    to the largest block length the occupancy guard allows (one block per
    path keeps the standard errors honest).
    """
    ladder = _validate_ladder(m_ladder)
    reference = rank_integral(model, grid).value
    norm = normalize_components(model, grid)
    if not norm.kept:
        return DimensionEstimate(
            0.0, "entropy-slope", ladder, k or 0, paths, 0.0, reference,
            notes="all components have zero variance; quantized process is constant",
        )
    k_need = k if k is not None else k_cap
    acov = autocovariance_from_spectrum(norm.model, max(k_need - 1, 0))
    batch = sample_paths(acov, k_need, paths, seed)
    if k is None:
        k = _choose_k(batch.samples, ladder[-1], paths, k_cap)
    slope, se, pairwise = _slope_from_samples(batch.samples, ladder, k, miller_madow)
    L = model.L
    within = bool(-0.1 <= slope <= L + 0.1)
    notes = "" if within else f"slope {slope:.4f} outside [-0.1, L+0.1]"
    return DimensionEstimate(slope, "entropy-slope", ladder, k, paths, se, reference, within, pairwise, notes)


def _half_mean_logdet(matrices: np.ndarray, floor: float) -> float:
    """(1/2) * frequency average of log det, eigenvalues floored before the log."""
    eig = np.linalg.eigvalsh(matrices)
    eig = np.maximum(eig, floor)
    return 0.5 * float(np.log(eig).sum(axis=1).mean())


def surrogate_idr_estimate(
    model: SpectralModel,
    m_ladder=SURROGATE_M_LADDER,
    paths: int = 200,
    k: int = 4096,
    seed: int = 0,
    nperseg: int = 1024,
    groups: int = 10,
    grid: FrequencyGrid | None = None,
) -> DimensionEstimate:
    """Dimension from the spectrum of the dithered quantized process.

    For each ladder precision m the quantized-plus-dither paths w are formed,
    their matrix spectrum is estimated by Welch averaging, and
    g(m) = (1/2) * integral of log det of that spectrum.  The estimate is
    L + slope of g against log m; the dither floor 1/(12 m^2) keeps the
    determinant away from zero, and estimated eigenvalues are floored at 1% of
    it before the log.  No cell counting happens, so large m is cheap.

    The long default segment keeps window-leakage bias down: nodes within a
    main lobe of a band edge read leaked in-band power instead of the 1/m^2
    floor, and each such node inflates the estimate by ~1/n_freq.
    """
    ladder = _validate_ladder(m_ladder)
    reference = rank_integral(model, grid).value
    norm = normalize_components(model, grid)
    if not norm.kept:
        return DimensionEstimate(
            0.0, "gaussian-surrogate", ladder, 0, paths, 0.0, reference,
            notes="all components have zero variance; dimension 0",
        )
    L = norm.model.L
    k_eff = min(k, 4096 // L)
    if k_eff < int(1.5 * nperseg):
        raise ValueError(f"k_eff={k_eff} too short for Welch segments of {nperseg}")
    acov = autocovariance_from_spectrum(norm.model, k_eff - 1)
    batch = sample_paths(acov, k_eff, paths, seed)
    groups = max(1, min(groups, paths))
    bounds = np.linspace(0, paths, groups + 1).astype(int)

    g_pooled, g_groups = [], []
    for m in ladder:
        w = dither(quantize(batch, m), seed)
        west = welch_psd(w.values, nperseg=nperseg)
        floor = 0.01 / (12.0 * m * m)
        g_pooled.append(_half_mean_logdet(west.matrices, floor))
        per_m_groups = []
        for gi in range(groups):
            sel = west.per_path[bounds[gi]:bounds[gi + 1]].mean(axis=0)
            sel = 0.5 * (sel + sel.conj().transpose(0, 2, 1))
            per_m_groups.append(_half_mean_logdet(sel, floor))
        g_groups.append(per_m_groups)

    logm = np.log(np.asarray(ladder, float))
    slope, _ = _ls_slope(logm, np.asarray(g_pooled))
    value = L + slope
    g_groups = np.asarray(g_groups)  # (n_m, groups)
    if groups > 1:
        group_vals = [L + _ls_slope(logm, g_groups[:, gi])[0] for gi in range(groups)]
        se = float(np.std(group_vals, ddof=1) / np.sqrt(groups))
    else:
        se = float("nan")
    pairwise = tuple(
        float(L + (g_pooled[i + 1] - g_pooled[i]) / (logm[i + 1] - logm[i]))
        for i in range(len(ladder) - 1)
    )
    within = bool(-0.1 <= value <= model.L + 0.1)
    return DimensionEstimate(
        value, "gaussian-surrogate", ladder, k_eff, paths, se, reference, within, pairwise,
        notes="" if within else f"estimate {value:.4f} outside [-0.1, L+0.1]",
    )


def kl_cap_per_coordinate() -> float:
    """Per-coordinate cap on the KL divergence between the dithered quantized
    law of a Gaussian block and its moment-matched Gaussian."""
    return 0.5 * np.log(2.0 * np.pi * (1.0 + 1.0 / 12.0)) + 75.0 / 2.0 + 24.0 / np.pi


@dataclass(frozen=True)
class KLCheckReport:
    block_len: int
    m: int
    kl: float
    bound: float
    passed: bool
    mass_deficit: float


def gaussian_surrogate_kl(model: SpectralModel, block_len: int, m: int) -> KLCheckReport:
    """KL divergence between the dithered-quantized block law and its Gaussian fit.

    The dithered value w = floor(m x)/m + u has the piecewise-constant density
    m^l * P(cell); its KL against the moment-matched Gaussian reduces to a sum
    over cells of closed-form integrals (the Gaussian log-density is a
    quadratic, integrated exactly over each cube).  Checked against the
    theoretical cap block_len * K.
    """
    if model.L != 1:
        raise ValueError("KL check is defined for univariate models (blocks of a scalar process)")
    if block_len not in (1, 2):
        raise ValueError("block_len must be 1 or 2 (quadrature feasibility)")
    dist = exact_cell_distribution(model, block_len, m)
    p = dist.probs
    cells = dist.codes / m
    centers = cells + 0.5 / m
    d = block_len
    mu_w = (p[:, None] * centers).sum(axis=0)
    centered = centers - mu_w
    cov_z = np.einsum("n,ni,nj->ij", p, centered, centered)
    cov_w = cov_z + np.eye(d) / (12.0 * m * m)
    prec = np.linalg.inv(cov_w)
    _, logdet = np.linalg.slogdet(cov_w)
    quad_at_centers = np.einsum("ni,ij,nj->n", centered, prec, centered)
    mean_quad = float((p * quad_at_centers).sum() + np.trace(prec) / (12.0 * m * m))
    discrete_term = float((p * np.log(np.maximum(p, 1e-300))).sum()) + d * np.log(m)
    kl = discrete_term + 0.5 * (d * np.log(2.0 * np.pi) + logdet + mean_quad)
    bound = block_len * kl_cap_per_coordinate()
    return KLCheckReport(block_len, int(m), float(kl), float(bound), bool(kl <= bound), dist.mass_deficit)


@dataclass(frozen=True)
class InvarianceReport:
    """Paired dimension estimates under a component-wise transform."""

    transform: str
    base: DimensionEstimate
    transformed: DimensionEstimate
    delta: float
    exact_entropy_delta: float | None = None
    exact_entropy_bound: float | None = None
    exact_ok: bool | None = None


def invariance_check(
    model: SpectralModel,
    transform: str,
    amount,
    m_ladder=DEFAULT_M_LADDER,
    k: int | None = None,
    paths: int = 100_000,
    seed: int = 0,
    exact_block: tuple | None = (1, 4),
    grid: FrequencyGrid | None = None,
) -> InvarianceReport:
    """Run the slope estimator on shared sample paths before and after a
    positive scaling or a translation; the dimension must not move.

    exact_block = (k, m) additionally verifies the finite-precision
    translation inequality |H([x]_m) - H([x + c]_m)| <= k*L*log(4) by
    quadrature: a translated code differs from code-plus-shifted-code by at
    most a few lattice steps, worth log 4 of entropy per coordinate.
    """
    if transform not in ("scale", "translate"):
        raise ValueError("transform must be 'scale' or 'translate'")
    amount = np.broadcast_to(np.asarray(amount, float), (model.L,)).copy()
    if transform == "scale" and (amount <= 0).any():
        raise ValueError("scale factors must be positive")
    ladder = _validate_ladder(m_ladder)
    reference = rank_integral(model, grid).value
    norm = normalize_components(model, grid)
    if not norm.kept:
        zero = DimensionEstimate(0.0, "entropy-slope", ladder, 0, paths, 0.0, reference)
        return InvarianceReport(transform, zero, zero, 0.0)
    amount_kept = amount[list(norm.kept)]

    k_need = k if k is not None else K_CAP
    acov = autocovariance_from_spectrum(norm.model, max(k_need - 1, 0))
    batch = sample_paths(acov, k_need, paths, seed)
    if k is None:
        k = _choose_k(batch.samples, ladder[-1], paths, k_cap=K_CAP)
    if transform == "scale":
        moved = batch.samples * amount_kept
    else:
        moved = batch.samples + amount_kept

    s0, se0, pw0 = _slope_from_samples(batch.samples, ladder, k, True)
    s1, se1, pw1 = _slope_from_samples(moved, ladder, k, True)
    base = DimensionEstimate(s0, "entropy-slope", ladder, k, paths, se0, reference, pairwise_slopes=pw0)
    trans = DimensionEstimate(
        s1, "entropy-slope", ladder, k, paths, se1, reference, pairwise_slopes=pw1,
        notes=f"{transform} by {np.array2string(amount, precision=3)}",
    )

    exact_delta = exact_bound = exact_ok = None
    if transform == "translate" and exact_block is not None:
        k_e, m_e = exact_block
        if k_e * model.L <= 3:
            h0 = exact_cell_entropy(model, k_e, m_e)
            h1 = exact_cell_entropy(model, k_e, m_e, mean_shift=amount)
            exact_delta = abs(h1.value - h0.value)
            exact_bound = k_e * model.L * np.log(4.0)
            exact_ok = bool(exact_delta <= exact_bound)
    return InvarianceReport(transform, base, trans, float(abs(s1 - s0)), exact_delta, exact_bound, exact_ok)
