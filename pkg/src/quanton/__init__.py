"""quanton: complementarity measures and entanglement monotones for small
quantum systems, with a which-way detector model and a criteria harness for
candidate measures."""

from ._backend import kernel_backend
from .errors import (
    ConfigError,
    DimensionError,
    EvaluationError,
    MeasureRejectedError,
    NotHermitianError,
    QuantonError,
    ValidationError,
)
from .linalg import (
    DensityMatrix,
    PureState,
    SchmidtDecomposition,
    dephase,
    hermitian_eig,
    partial_trace,
    purify,
    schmidt_decompose,
    tensor_product,
)
from .measures import (
    concurrence_mixed_2q,
    concurrence_pure_2q,
    e_script_q,
    eof_2q,
    predictability_vn,
    rel_entropy_coherence,
    shannon_entropy,
    vn_entropy,
)
from .sampling import (
    haar_random_pure,
    make_rng,
    random_density_matrix,
    random_unitary,
    split_seed,
)
from .detector import (
    ComplementarityRecord,
    DetectorConfig,
    MeasurementBasis,
    SubEnsembleSet,
    avg_coherence,
    build_joint_state,
    complementarity_record,
    detector_basis,
    distinguishability_vn,
    e_gap_diag,
    e_gap_full,
    maximize_distinguishability,
    sort_ensemble,
    uniform_overlap_config,
)
from .monotones import (
    RegisteredPredictability,
    RoofResult,
    SymmetricConcaveFn,
    convex_roof,
    maximal_state_check,
    monotone_pure,
    robustness_pure,
    spectrum_function,
    spectrum_shannon,
    theorem_monotone,
    theorem_monotone_normalized,
)

__version__ = "0.1.0"
