"""Recover the similarity transformation relating two observable
state-space realizations and move full realizations between coordinates."""

from .errors import (
    DimensionMismatch,
    KernelDimensionMismatch,
    NotObservable,
    NotSimilarOrAmbiguous,
    RankDeficientCoefficientSystem,
    ResidualTooLarge,
    SingularMatrix,
    SingularTransform,
    SizeCapExceeded,
    SSEquivError,
)
from .matcore import Tolerances
from .realization import (
    ObservabilityReport,
    Realization,
    is_observable,
    markov_equivalent,
    markov_parameters,
    observability_matrix,
)
from .simtransform import (
    KernelBasis,
    SimilarityTransform,
    assemble_transform,
    build_displacement_matrix,
    find_similarity,
    kernel_candidates,
    solve_alpha,
    transform_realization,
    validate_lemma_rank,
)

__version__ = "0.1.0"
