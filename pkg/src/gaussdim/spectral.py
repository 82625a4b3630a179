"""Matrix-valued spectral densities on [-1/2, 1/2] and the spectral rank integral.

A stationary L-variate real Gaussian process is described by a spectral model:
a sum of constant Hermitian PSD matrices on frequency bands, optional rational
terms (polynomial ratios in z = e^{-i 2 pi theta}) for smooth spectra, and
discrete spectral lines.  The frequency average of the numerical rank of the
density is the model's information dimension rate and serves as the reference
value for every estimator in this package.

Bivariate models double as complex processes (component 0 = real part,
component 1 = imaginary part); the complex-process helpers live here too.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_GRID_N = 4096
MIN_GRID_N = 64
RANK_REL_TOL = 1e-9
RANK_ABS_FLOOR = 1e-300
PSD_TOL = 1e-10
SYMMETRY_TOL = 1e-10
PROPERNESS_TOL = 1e-12

_SYMMETRY_PROBE_N = 512


class ModelValidationError(ValueError):
    """A spectral model violates one of its structural invariants."""


class EigenSolverError(RuntimeError):
    """Eigendecomposition failed on a specific frequency node."""


@dataclass(frozen=True)
class FrequencyGrid:
    """Midpoint quadrature grid: nodes -1/2 + (j + 1/2)/n, uniform weight 1/n.

    The half-step offset keeps dyadic band endpoints strictly between nodes,
    so endpoint sets of measure zero never bias node counts.
    """

    n: int = DEFAULT_GRID_N

    def __post_init__(self):
        if self.n < 2 or self.n % 2 != 0:
            raise ValueError(f"grid size must be even and >= 2, got {self.n}")

    @property
    def nodes(self) -> np.ndarray:
        return -0.5 + (np.arange(self.n) + 0.5) / self.n

    @property
    def weight(self) -> float:
        return 1.0 / self.n


def _hermitian_matrix(mat, L: int, what: str) -> np.ndarray:
    arr = np.asarray(mat, dtype=complex)
    if arr.shape != (L, L):
        raise ModelValidationError(f"{what} must be {L}x{L}, got shape {arr.shape}")
    scale = max(1.0, float(np.abs(arr).max(initial=0.0)))
    if np.abs(arr - arr.conj().T).max(initial=0.0) > PSD_TOL * scale:
        raise ModelValidationError(f"{what} is not Hermitian")
    arr = 0.5 * (arr + arr.conj().T)
    eig = np.linalg.eigvalsh(arr)
    if eig.min() < -PSD_TOL * max(1.0, eig.max()):
        raise ModelValidationError(
            f"{what} is not positive semidefinite (min eigenvalue {eig.min():.3e})"
        )
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Band:
    """Constant Hermitian PSD density on the half-open interval [lo, hi)."""

    lo: float
    hi: float
    matrix: np.ndarray


@dataclass(frozen=True)
class SpectralLine:
    """Discrete jump of the spectral distribution at a single frequency."""

    theta: float
    power: np.ndarray


@dataclass(frozen=True)
class RationalTerm:
    """Adds num(z)/den(z), z = e^{-i 2 pi theta}, to entry (row, col).

    Coefficients are ascending powers of z.  Off-diagonal terms implicitly add
    the conjugate to the mirrored entry, keeping the matrix Hermitian.
    """

    row: int
    col: int
    num: tuple
    den: tuple


@dataclass(frozen=True)
class SpectralModel:
    """Spectral description of a stationary L-variate real Gaussian process."""

    L: int
    bands: tuple = ()
    arma_terms: tuple = ()
    lines: tuple = ()
    mean: np.ndarray = None
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if self.L < 1:
            raise ModelValidationError(f"L must be >= 1, got {self.L}")
        mean = np.zeros(self.L) if self.mean is None else np.asarray(self.mean, float)
        if mean.shape != (self.L,):
            raise ModelValidationError(f"mean must have shape ({self.L},)")
        mean = mean.copy()
        mean.setflags(write=False)
        object.__setattr__(self, "mean", mean)

        bands = []
        for b in self.bands:
            if not isinstance(b, Band):
                b = Band(float(b[0]), float(b[1]), b[2])
            bands.append(Band(float(b.lo), float(b.hi), _hermitian_matrix(b.matrix, self.L, "band matrix")))
        bands.sort(key=lambda b: b.lo)
        object.__setattr__(self, "bands", tuple(bands))

        lines = []
        for ln in self.lines:
            if not isinstance(ln, SpectralLine):
                ln = SpectralLine(float(ln[0]), ln[1])
            lines.append(SpectralLine(float(ln.theta), _hermitian_matrix(ln.power, self.L, "line power")))
        object.__setattr__(self, "lines", tuple(lines))

        terms = []
        for t in self.arma_terms:
            if not isinstance(t, RationalTerm):
                t = RationalTerm(int(t[0]), int(t[1]), tuple(t[2]), tuple(t[3]))
            if not (0 <= t.row < self.L and 0 <= t.col < self.L):
                raise ModelValidationError(f"rational term indices ({t.row},{t.col}) out of range")
            terms.append(RationalTerm(t.row, t.col, tuple(complex(c) for c in t.num), tuple(complex(c) for c in t.den)))
        object.__setattr__(self, "arma_terms", tuple(terms))

        if self.validate:
            _validate_model(self)


def _validate_model(model: SpectralModel) -> None:
    for b in model.bands:
        if not (-0.5 - 1e-12 <= b.lo < b.hi <= 0.5 + 1e-12):
            raise ModelValidationError(f"band [{b.lo}, {b.hi}) outside [-1/2, 1/2] or empty")
    for prev, nxt in zip(model.bands, model.bands[1:]):
        if nxt.lo < prev.hi - 1e-15:
            raise ModelValidationError(
                f"bands [{prev.lo}, {prev.hi}) and [{nxt.lo}, {nxt.hi}) overlap"
            )
    for ln in model.lines:
        if not -0.5 <= ln.theta <= 0.5:
            raise ModelValidationError(f"line frequency {ln.theta} outside [-1/2, 1/2]")

    # real process: density and jumps must mirror as S(-theta) = conj(S(theta))
    for b in model.bands:
        mirror = None
        for c in model.bands:
            if abs(c.lo + b.hi) < 1e-12 and abs(c.hi + b.lo) < 1e-12:
                mirror = c
                break
        covers_self = abs(b.lo + b.hi) < 1e-12  # symmetric interval
        if covers_self:
            mirror = b
        if mirror is None:
            raise ModelValidationError(
                f"band [{b.lo}, {b.hi}) has no mirrored band; real processes need S(-t)=conj(S(t))"
            )
        if np.abs(mirror.matrix - b.matrix.conj()).max() > SYMMETRY_TOL * (1.0 + np.abs(b.matrix).max()):
            raise ModelValidationError(
                f"band [{b.lo}, {b.hi}) and its mirror violate S(-t)=conj(S(t))"
            )
    for ln in model.lines:
        if abs(ln.theta) < 1e-12:
            continue
        partner = [p for p in model.lines if abs(p.theta + ln.theta) < 1e-12]
        if not partner or np.abs(partner[0].power - ln.power.conj()).max() > SYMMETRY_TOL * (
            1.0 + np.abs(ln.power).max()
        ):
            raise ModelValidationError(
                f"line at {ln.theta} needs a conjugate partner at {-ln.theta}"
            )

    if model.arma_terms:
        probe = FrequencyGrid(_SYMMETRY_PROBE_N)
        mats = _assemble_spectrum(model, probe.nodes)
        _check_nodes(mats, probe.nodes)


def _eval_rational(model: SpectralModel, nodes: np.ndarray) -> np.ndarray:
    """Rational contributions only, assembled Hermitian."""
    out = np.zeros((len(nodes), model.L, model.L), dtype=complex)
    if not model.arma_terms:
        return out
    z = np.exp(-2j * np.pi * nodes)
    for t in model.arma_terms:
        num = np.polynomial.polynomial.polyval(z, np.asarray(t.num))
        den = np.polynomial.polynomial.polyval(z, np.asarray(t.den))
        bad = np.abs(den) < 1e-14
        if bad.any():
            raise ModelValidationError(
                f"rational term ({t.row},{t.col}) denominator vanishes near theta={nodes[bad][0]:+.6f}"
            )
        val = num / den
        out[:, t.row, t.col] += val
        if t.row != t.col:
            out[:, t.col, t.row] += val.conj()
    return out


def _assemble_spectrum(model: SpectralModel, nodes: np.ndarray) -> np.ndarray:
    out = np.zeros((len(nodes), model.L, model.L), dtype=complex)
    for b in model.bands:
        mask = (nodes >= b.lo) & (nodes < b.hi)
        out[mask] += b.matrix
    out += _eval_rational(model, nodes)
    return out


def _check_nodes(mats: np.ndarray, nodes: np.ndarray) -> None:
    scale = 1.0 + np.abs(mats).max(initial=0.0)
    herm_err = np.abs(mats - mats.conj().transpose(0, 2, 1)).max(axis=(1, 2))
    if herm_err.max(initial=0.0) > PSD_TOL * scale:
        j = int(herm_err.argmax())
        raise ModelValidationError(f"density not Hermitian at theta={nodes[j]:+.6f}")
    sym_err = np.abs(mats[::-1] - mats.conj()).max(axis=(1, 2))
    if sym_err.max(initial=0.0) > SYMMETRY_TOL * scale:
        j = int(sym_err.argmax())
        raise ModelValidationError(
            f"S(-t)=conj(S(t)) violated at theta={nodes[j]:+.6f} (error {sym_err[j]:.3e})"
        )
    eig = np.linalg.eigvalsh(mats)
    viol = eig[:, 0] < -PSD_TOL * np.maximum(1.0, eig[:, -1])
    if viol.any():
        j = int(np.argmax(viol))
        raise ModelValidationError(
            f"density not PSD at theta={nodes[j]:+.6f} (min eigenvalue {eig[j, 0]:.3e})"
        )


def eval_spectrum(model: SpectralModel, grid: FrequencyGrid) -> np.ndarray:
    """Density matrices S(theta_j) on the grid, shape (n, L, L), lines excluded.

    Lines are jumps of the spectral distribution; the derivative they carry is
    zero almost everywhere, so they contribute nothing here.
    """
    nodes = grid.nodes
    mats = _assemble_spectrum(model, nodes)
    _check_nodes(mats, nodes)
    return mats


@dataclass(frozen=True)
class RankProfile:
    """Per-node eigenvalues (descending) and numerical ranks of the density."""

    eigenvalues: np.ndarray  # (n, L), descending per node
    ranks: np.ndarray  # (n,) ints
    rel_tol: float
    abs_floor: float

    @property
    def mean_rank(self) -> float:
        return float(self.ranks.mean())

    def histogram(self) -> dict:
        vals, counts = np.unique(self.ranks, return_counts=True)
        return {int(v): float(c) / len(self.ranks) for v, c in zip(vals, counts)}


def _numerical_ranks(eigs_desc: np.ndarray, rel_tol: float, abs_floor: float) -> np.ndarray:
    top = np.maximum(eigs_desc[..., 0], abs_floor)
    thresh = rel_tol * top
    return (eigs_desc > thresh[..., None]).sum(axis=-1)


def rank_profile(
    matrices: np.ndarray,
    rel_tol: float = RANK_REL_TOL,
    abs_floor: float = RANK_ABS_FLOOR,
    nodes: np.ndarray | None = None,
) -> RankProfile:
    """Eigenvalues and numerical ranks for a stack of Hermitian matrices.

    An eigenvalue counts toward the rank iff it exceeds
    rel_tol * max(largest eigenvalue at that node, abs_floor).
    """
    try:
        eig = np.linalg.eigvalsh(matrices)
    except np.linalg.LinAlgError:
        for j, mat in enumerate(matrices):
            try:
                np.linalg.eigvalsh(mat)
            except np.linalg.LinAlgError as exc:
                where = f"theta={nodes[j]:+.6f}" if nodes is not None else f"index {j}"
                raise EigenSolverError(f"eigendecomposition failed at node {where}") from exc
        raise
    eig = eig[..., ::-1]
    ranks = _numerical_ranks(eig, rel_tol, abs_floor)
    return RankProfile(eig, ranks, rel_tol, abs_floor)


@dataclass(frozen=True)
class RankIntegralResult:
    value: float
    profile: RankProfile
    method: str  # "segment-exact" or "grid"
    grid_n: int


def _segment_rank_integral(model: SpectralModel, rel_tol: float, abs_floor: float) -> float:
    """Exact integral of the rank for band-only models.

    The density is constant between consecutive band endpoints, so the rank is
    integrated segment by segment with no grid discretization error.
    """
    edges = {-0.5, 0.5}
    for b in model.bands:
        edges.add(b.lo)
        edges.add(b.hi)
    edges = sorted(edges)
    total = 0.0
    for a, b in zip(edges, edges[1:]):
        if b - a <= 1e-15:
            continue
        mid = 0.5 * (a + b)
        mat = np.zeros((model.L, model.L), dtype=complex)
        for band in model.bands:
            if band.lo <= mid < band.hi:
                mat += band.matrix
        eig = np.linalg.eigvalsh(mat)[::-1]
        rank = int(_numerical_ranks(eig[None, :], rel_tol, abs_floor)[0])
        total += rank * (b - a)
    return total


def rank_integral(
    model_or_matrices,
    grid: FrequencyGrid | None = None,
    rel_tol: float = RANK_REL_TOL,
    abs_floor: float = RANK_ABS_FLOOR,
) -> RankIntegralResult:
    """Average rank of the spectral density over [-1/2, 1/2].

    For band-only models the value is computed exactly from the band segment
    lengths; models with rational terms fall back to the midpoint grid sum.
    The per-node RankProfile is always reported from the grid.
    """
    if isinstance(model_or_matrices, SpectralModel):
        model = model_or_matrices
        grid = grid or FrequencyGrid()
        if grid.n < MIN_GRID_N:
            raise ValueError(f"grid resolution must be >= {MIN_GRID_N}, got {grid.n}")
        mats = eval_spectrum(model, grid)
        profile = rank_profile(mats, rel_tol, abs_floor, nodes=grid.nodes)
        if model.arma_terms:
            value = profile.mean_rank
            method = "grid"
        else:
            value = _segment_rank_integral(model, rel_tol, abs_floor)
            method = "segment-exact"
        return RankIntegralResult(value, profile, method, grid.n)

    if isinstance(model_or_matrices, BivariateSpectrum):
        matrices = model_or_matrices.matrices
    else:
        matrices = np.asarray(model_or_matrices)
    profile = rank_profile(matrices, rel_tol, abs_floor)
    return RankIntegralResult(profile.mean_rank, profile, "grid", len(matrices))


@dataclass(frozen=True)
class BivariateSpectrum:
    """Gridded 2x2 density of a complex process viewed as (real, imaginary).

    scalar_density is the density of the complex process itself:
    S_Z = S_R + S_I + 2 Im(S_RI).
    """

    matrices: np.ndarray  # (n, 2, 2) Hermitian
    scalar_density: np.ndarray  # (n,)
    grid: FrequencyGrid | None = None


def complex_to_bivariate(
    s_r: np.ndarray,
    s_i: np.ndarray,
    s_ri: np.ndarray,
    grid: FrequencyGrid | None = None,
) -> BivariateSpectrum:
    """Pack per-node real/imaginary/cross densities into 2x2 matrices.

    Validates the PSD condition S_R * S_I >= |S_RI|^2 node by node and also
    returns the scalar complex-process density S_Z.
    """
    s_r = np.asarray(s_r, dtype=float)
    s_i = np.asarray(s_i, dtype=float)
    s_ri = np.asarray(s_ri, dtype=complex)
    if not (s_r.shape == s_i.shape == s_ri.shape):
        raise ValueError("S_R, S_I, S_RI must share one grid")
    scale = 1.0 + max(s_r.max(initial=0.0), s_i.max(initial=0.0), np.abs(s_ri).max(initial=0.0))
    tol = PSD_TOL * scale
    for name, arr in (("S_R", s_r), ("S_I", s_i)):
        if arr.min() < -tol:
            j = int(arr.argmin())
            raise ModelValidationError(f"{name} negative at node {j} ({arr[j]:.3e})")
    gap = s_r * s_i - np.abs(s_ri) ** 2
    if gap.min() < -tol * scale:
        j = int(gap.argmin())
        raise ModelValidationError(
            f"PSD condition S_R*S_I >= |S_RI|^2 violated at node {j} (gap {gap[j]:.3e})"
        )
    n = len(s_r)
    mats = np.empty((n, 2, 2), dtype=complex)
    mats[:, 0, 0] = np.maximum(s_r, 0.0)
    mats[:, 1, 1] = np.maximum(s_i, 0.0)
    mats[:, 0, 1] = s_ri
    mats[:, 1, 0] = s_ri.conj()
    s_z = s_r + s_i + 2.0 * s_ri.imag
    return BivariateSpectrum(mats, s_z, grid)


def bivariate_from_model(model: SpectralModel, grid: FrequencyGrid | None = None) -> BivariateSpectrum:
    """View an L=2 model as the (real, imaginary) pair of a complex process."""
    if model.L != 2:
        raise ValueError("complex-process analysis needs a bivariate (L=2) model")
    grid = grid or FrequencyGrid()
    mats = eval_spectrum(model, grid)
    return complex_to_bivariate(mats[:, 0, 0].real, mats[:, 1, 1].real, mats[:, 0, 1], grid)


@dataclass(frozen=True)
class PropernessReport:
    proper: bool
    max_density_mismatch: float  # max |S_R - S_I|
    max_real_cross: float  # max |Re S_RI|
    tolerance: float


def properness_check(spectrum: BivariateSpectrum | SpectralModel, grid: FrequencyGrid | None = None) -> PropernessReport:
    """Proper iff S_R = S_I and S_RI is purely imaginary at every node.

    Properness of a complex process means a vanishing pseudo-autocovariance;
    in the spectral domain that is exactly the two conditions tested here.
    """
    bs = bivariate_from_model(spectrum, grid) if isinstance(spectrum, SpectralModel) else spectrum
    s_r = bs.matrices[:, 0, 0].real
    s_i = bs.matrices[:, 1, 1].real
    s_ri = bs.matrices[:, 0, 1]
    norm = np.linalg.norm(bs.matrices, axis=(1, 2))
    tol = float(PROPERNESS_TOL * (1.0 + norm.max(initial=0.0)))
    mismatch = float(np.abs(s_r - s_i).max(initial=0.0))
    real_cross = float(np.abs(s_ri.real).max(initial=0.0))
    ok = bool(
        np.all(np.abs(s_r - s_i) <= PROPERNESS_TOL * (1.0 + norm))
        and np.all(np.abs(s_ri.real) <= PROPERNESS_TOL * (1.0 + norm))
    )
    return PropernessReport(ok, mismatch, real_cross, tol)


@dataclass(frozen=True)
class SupportBoundReport:
    """Dimension of the bivariate process vs. 2x the support measure of S_Z."""

    dimension: float
    bound: float
    gap: float
    tight: bool
    tolerance: float


def support_bound(
    spectrum: BivariateSpectrum | SpectralModel,
    grid: FrequencyGrid | None = None,
    rel_tol: float = RANK_REL_TOL,
    abs_floor: float = RANK_ABS_FLOOR,
) -> SupportBoundReport:
    """Check dimension <= 2 * measure{S_Z > 0}, tight for proper processes.

    Band-only models are evaluated exactly by segment arithmetic; gridded
    inputs use node counting with a grid-resolution tolerance.
    """
    if isinstance(spectrum, SpectralModel):
        model = spectrum
        d = rank_integral(model, grid).value
        if model.arma_terms:
            bs = bivariate_from_model(model, grid)
            bound = _grid_support_measure(bs.scalar_density, rel_tol, abs_floor)
            tol = 4.0 / len(bs.scalar_density)
        else:
            if model.L != 2:
                raise ValueError("complex-process analysis needs a bivariate (L=2) model")
            bound = _segment_support_measure(model, rel_tol, abs_floor)
            tol = 1e-9
    else:
        d = rank_integral(spectrum).value
        bound = _grid_support_measure(spectrum.scalar_density, rel_tol, abs_floor)
        tol = 4.0 / len(spectrum.scalar_density)
    gap = bound - d
    if gap < -tol:
        raise AssertionError(
            f"support bound violated: dimension {d:.6f} exceeds bound {bound:.6f}"
        )
    return SupportBoundReport(d, bound, gap, bool(abs(gap) <= tol), tol)


def _grid_support_measure(s_z: np.ndarray, rel_tol: float, abs_floor: float) -> float:
    thresh = rel_tol * max(s_z.max(initial=0.0), abs_floor)
    return 2.0 * float((s_z > thresh).sum()) / len(s_z)


def _segment_support_measure(model: SpectralModel, rel_tol: float, abs_floor: float) -> float:
    edges = {-0.5, 0.5}
    for b in model.bands:
        edges.add(b.lo)
        edges.add(b.hi)
    edges = sorted(edges)
    peak = max((float(b.matrix[0, 0].real + b.matrix[1, 1].real + 2 * b.matrix[0, 1].imag) for b in model.bands), default=0.0)
    thresh = rel_tol * max(peak, abs_floor)
    measure = 0.0
    for a, b in zip(edges, edges[1:]):
        if b - a <= 1e-15:
            continue
        mid = 0.5 * (a + b)
        s_z = 0.0
        for band in model.bands:
            if band.lo <= mid < band.hi:
                s_z += float(band.matrix[0, 0].real + band.matrix[1, 1].real + 2 * band.matrix[0, 1].imag)
        if s_z > thresh:
            measure += b - a
    return 2.0 * measure


def component_variances(model: SpectralModel, grid: FrequencyGrid | None = None) -> np.ndarray:
    """Per-component total power: integrated density plus line jumps."""
    var = np.zeros(model.L)
    for b in model.bands:
        var += (b.hi - b.lo) * np.diag(b.matrix).real
    for ln in model.lines:
        var += np.diag(ln.power).real
    if model.arma_terms:
        grid = grid or FrequencyGrid()
        rat = _eval_rational(model, grid.nodes)
        var += np.einsum("nii->i", rat).real * grid.weight
    return var


@dataclass(frozen=True)
class NormalizationResult:
    model: SpectralModel
    scales: np.ndarray  # multiplier applied to each kept component
    kept: tuple
    dropped: tuple


def normalize_components(model: SpectralModel, grid: FrequencyGrid | None = None) -> NormalizationResult:
    """Drop zero-variance components and rescale the rest to unit variance.

    Rescaling is a congruence by a positive diagonal matrix, so the rank of
    the density (and hence the dimension) is unchanged; zero-variance
    components contribute nothing to either.
    """
    var = component_variances(model, grid)
    tol = 1e-14 * max(1.0, var.max(initial=0.0))
    kept = tuple(int(i) for i in np.flatnonzero(var > tol))
    dropped = tuple(int(i) for i in np.flatnonzero(var <= tol))
    if not kept:
        empty = SpectralModel(L=model.L, bands=(), arma_terms=(), lines=(), mean=np.zeros(model.L))
        return NormalizationResult(empty, np.ones(0), kept, dropped)
    idx = np.asarray(kept)
    scales = 1.0 / np.sqrt(var[idx])
    d = np.diag(scales)

    def congruence(mat):
        return d @ mat[np.ix_(idx, idx)] @ d

    if any(t.row in dropped or t.col in dropped for t in model.arma_terms):
        raise ModelValidationError("rational term attached to a zero-variance component")
    remap = {orig: new for new, orig in enumerate(kept)}
    new_model = SpectralModel(
        L=len(kept),
        bands=tuple(Band(b.lo, b.hi, congruence(b.matrix)) for b in model.bands),
        arma_terms=tuple(
            RationalTerm(
                remap[t.row],
                remap[t.col],
                tuple(c * scales[remap[t.row]] * scales[remap[t.col]] for c in t.num),
                t.den,
            )
            for t in model.arma_terms
        ),
        lines=tuple(SpectralLine(ln.theta, congruence(ln.power)) for ln in model.lines),
        mean=model.mean[idx] * scales,
    )
    return NormalizationResult(new_model, scales, kept, dropped)


def permute_components(model: SpectralModel, perm) -> SpectralModel:
    """Reorder components; the rank integral is invariant under this."""
    p = np.asarray(perm)
    if sorted(p.tolist()) != list(range(model.L)):
        raise ValueError("perm must be a permutation of range(L)")
    return SpectralModel(
        L=model.L,
        bands=tuple(Band(b.lo, b.hi, b.matrix[np.ix_(p, p)]) for b in model.bands),
        arma_terms=tuple(
            RationalTerm(int(np.where(p == t.row)[0][0]), int(np.where(p == t.col)[0][0]), t.num, t.den)
            for t in model.arma_terms
        ),
        lines=tuple(SpectralLine(ln.theta, ln.power[np.ix_(p, p)]) for ln in model.lines),
        mean=model.mean[p],
    )


def scale_components(model: SpectralModel, factors) -> SpectralModel:
    """Congruence-scale the model by diag(factors); density ranks are preserved."""
    a = np.asarray(factors, dtype=float)
    if a.shape != (model.L,) or (a <= 0).any():
        raise ValueError("factors must be positive, one per component")
    d = np.diag(a)
    return SpectralModel(
        L=model.L,
        bands=tuple(Band(b.lo, b.hi, d @ b.matrix @ d) for b in model.bands),
        arma_terms=tuple(
            RationalTerm(t.row, t.col, tuple(c * a[t.row] * a[t.col] for c in t.num), t.den)
            for t in model.arma_terms
        ),
        lines=tuple(SpectralLine(ln.theta, d @ ln.power @ d) for ln in model.lines),
        mean=model.mean * a,
    )
