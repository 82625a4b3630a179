"""Information dimension rate of stationary multivariate Gaussian processes.

Two independent routes to the same number: the average rank of the spectral
density (exact, analytic) and quantized-entropy / rate-distortion slopes
(empirical), plus the diagnostics that connect them.
"""

from .spectral import (
    Band,
    BivariateSpectrum,
    FrequencyGrid,
    ModelValidationError,
    PropernessReport,
    RankIntegralResult,
    RankProfile,
    RationalTerm,
    SpectralLine,
    SpectralModel,
    SupportBoundReport,
    bivariate_from_model,
    complex_to_bivariate,
    component_variances,
    eval_spectrum,
    normalize_components,
    permute_components,
    properness_check,
    rank_integral,
    rank_profile,
    scale_components,
    support_bound,
)
from .simulate import (
    AutocovarianceSequence,
    SamplePathBatch,
    WelchEstimate,
    autocovariance_from_spectrum,
    export_batch,
    import_batch,
    sample_paths,
    welch_psd,
)
from .quantize import (
    BussgangReport,
    DitheredPathBatch,
    QuantizedPathBatch,
    SpectrumIdentityReport,
    bussgang_gain,
    dither,
    quantize,
    spectrum_identity_check,
)
from .entropy import (
    CellDistribution,
    EntropyEstimate,
    exact_cell_distribution,
    exact_cell_entropy,
    plugin_entropy,
)
from .estimators import (
    DimensionEstimate,
    InvarianceReport,
    KLCheckReport,
    gaussian_surrogate_kl,
    idr_slope_estimate,
    invariance_check,
    surrogate_idr_estimate,
)
from .ratedist import (
    RDCurve,
    WaterfillPoint,
    finite_block_rate,
    rd_curve,
    rd_dimension_estimate,
    waterfill_rate,
)
from .reports import EstimateReport, RunReport, emit, load_report
from .experiments import ExperimentConfig, run

import types as _types

__all__ = [
    name
    for name, obj in list(globals().items())
    if not name.startswith("_") and not isinstance(obj, _types.ModuleType)
]
