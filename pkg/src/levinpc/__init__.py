"""Levin's constant, affine-necklace constants, and the pair correlations of ``{2**n x}``."""

from .errors import LevinError, ResourceLimitError, SingularMatrixError, ValidationError
from .gf2 import (
    BitWord,
    Gf2Matrix,
    SuitableTuple,
    enumerate_suitable,
    is_nonsingular,
    mat_vec,
    pascal_matrix,
    rotate,
    rotated_matrix,
    solve,
    validate_suitable,
)
from .necklace import (
    LEVIN,
    ConstantSpec,
    DigitStream,
    NecklaceSpec,
    block_length,
    build_block,
    cumulative_length,
    digit_at,
    digits_range,
    lex_word,
    parse_constant_spec,
    serialize_constant_spec,
)
from .stats import (
    DiscrepancyReport,
    PairCorrReport,
    PointSet,
    baseline_points,
    block_pair_correlation,
    pair_correlation,
    pair_correlation_points,
    star_discrepancy,
    truncated_points,
)
from .combinatorics import (
    TargetWord,
    binom_identity_check,
    constrained_count,
    enumerate_targets,
    lower_bound,
    occurrence_oracle,
    predicted_count,
    verify_counting,
    verify_lemmas,
)

__version__ = "0.1.0"
