"""Equivalence-class quantum state toolkit.

Finite-dimensional density-operator machinery for comparing two reduction
channels over apparatus-defined sectors, together with the operator-algebra
structure (commutants, centers, superselection sectors), entropy analysis,
and a toy dynamics layer with an entropy-based projector-set sieve.
"""

from .errors import (
    AlgebraError,
    ConfigError,
    DimensionMismatchError,
    InvariantViolationError,
    MaxEntropyCounterexampleError,
    ProjectorSetError,
    StateError,
    ToolkitError,
    UnoccupiedSectorError,
    ValidationError,
    Violation,
)
from .tensor_space import (
    BipartiteSpace,
    partial_trace_A,
    spectral_decompose,
    tensor_product,
)
from .states import (
    ApparatusProjectorSet,
    DensityOperator,
    ProjectorSet,
    PureState,
    conditional_state,
    lift_apparatus_projectors,
    make_pure,
    relative_expansion,
    relative_state,
    sectors_from_indices,
    validate_projector_set,
)
from .operator_algebra import (
    ContainmentCheck,
    DualityReport,
    OperatorAlgebra,
    SuperselectionOperator,
    algebra_commutant,
    bicommutant,
    center,
    commutant,
    contains,
    generated_algebra,
    superselection_sectors,
    verify_duality,
)
from .reduction import (
    EquivalenceCheck,
    EquivalenceClassRep,
    PurifiedReduction,
    SectorComponent,
    dlp_reduce,
    equivalent_modified,
    equivalent_standard,
    luders_dephase,
    luders_select,
    modified_reduce,
    representatives_match,
)
from .entropy_analysis import (
    EntropyReport,
    MaxEntropyReport,
    entropy_chain,
    jaynes_gap,
    random_density_operator,
    sample_equivalence_class,
    shannon_entropy,
    verify_max_entropy,
    von_neumann_entropy,
)
from .dynamics import (
    DecoherenceEstimate,
    EntropyTrajectory,
    EvolutionSpec,
    PointerModelConfig,
    SieveReport,
    TimescaleReport,
    build_measurement_model,
    check_timescales,
    estimate_decoherence_time,
    evolve,
    interference_norm,
    pointer_sectors,
    repeated_reduction_run,
    sieve,
    sieve_winner_stability,
)

__version__ = "0.1.0"
