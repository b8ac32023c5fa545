"""Toolkit for hidden heavy-tail structure in multivariate samples.

Estimate tail indices on order components, detect regular variation on
nested sub-cones, estimate hidden angular measures (standard and
rank-based), check moment finiteness, and price joint-exceedance and
linear-combination tail risks semi-parametrically.
"""

from .data import (
    RankTransformed,
    SampleMatrix,
    anti_ranks,
    inverse_rank_matrix,
    load_csv,
    lth_largest,
    rank_transform,
    sort_descending,
)
from .detect import (
    DegeneracyResult,
    DetectionConfig,
    DetectionReport,
    LevelReport,
    degeneracy_test,
    pushforward_M,
    sequential_hrv_search,
)
from .errors import (
    AllZeroLevelError,
    BadAlphaError,
    BadBandwidthError,
    BadThresholdError,
    DegenerateDataError,
    DegenerateMassWarning,
    EmptyInputError,
    EmptySampleError,
    ExtrapolationWarning,
    HrvError,
    InfiniteAtomError,
    InteriorDivergenceWarning,
    InvalidSampleError,
    KTooLargeError,
    LevelOutOfRangeError,
    NegativeValueError,
    NoAtomsError,
    NoMassError,
    NonNumericError,
    NonPositiveDataError,
    NotInSimplexError,
    RaggedRowsError,
    UnknownExampleError,
)
from .finiteness import (
    ExponentCheck,
    MassVerdict,
    interior_exponent_check,
    moment_mass,
    moment_mass_simplex,
)
from .risk import (
    MarginalScales,
    RiskEstimate,
    joint_exceedance_hr,
    joint_exceedance_semiparam,
    linear_combination_risk,
    marginal_scale_rank,
    marginal_tail_probability,
    noncompliance_probability,
    pareto_radial_integral,
)
from .simulate import (
    GeneratorSpec,
    dataset_metadata,
    example_dataset,
    pareto_sample,
    polar_sample,
    registered_examples,
)
from .spectral import (
    DensityCurve,
    SpectralAtoms,
    TransformedAtoms,
    density_estimate,
    estimate_spectral_rank,
    estimate_spectral_standard,
    phi,
    transform_T,
    transform_T_inverse,
    transform_measure,
)
from .tail import (
    TailFit,
    TailSeriesPoint,
    alt_tail_estimate,
    hill_estimate,
    hill_series,
    intermediate_scale,
)

__version__ = "0.1.0"
