"""Core modules for ucfactor."""

from .errors import (
    CertificationError,
    DegenerateMeasureError,
    DimensionMismatchError,
    EnumerationCapError,
    InvalidSequenceError,
    NotHermitianError,
    NotPositiveSemidefiniteError,
    OrthonormalityError,
    ProblemFileError,
    ProblemTooLargeError,
    RowNormError,
    UCFactorError,
    WitnessMarginError,
    ZeroVectorError,
)
from .hilbert import (
    analysis_coefficients,
    bessel_bound,
    c0_operator_norm,
    c0_operator_norm_witness,
    frame_operator,
    gram,
    inner,
    orlicz_sum,
    spectral_norm,
    synthesis_matrix,
    top_eigenpair,
    weak_l1_sum,
)
from .models import (
    DiscreteMeasure,
    DualCheck,
    Factorization,
    HSSequence,
    MeasureSplit,
    MultiplierSpec,
    NuclearFactorization,
    PietschSolution,
    SymbolSplit,
    UCReport,
    VectorSequence,
    WeakWitness,
)
from .multiplier import absolute_profile, adjoint_spec, apply, assemble, from_operator, orlicz_condition, uc_constant
from .oracle import brute_pietsch, brute_sign_norm, dual_value, random_factorization_cost
from .pietsch import construct_alpha_f, factorization_cost, factorize, min_dominating_diagonal, pietsch_factorize
from .settings import DEFAULT_SETTINGS, apply_env_overrides, load_settings, save_settings
from .splitting import (
    hs_bessel_probe,
    hs_tensor_sequence,
    jmu_embed,
    split_absolute,
    split_measure,
    split_weak,
    verify_witness,
    witness_domination,
)
