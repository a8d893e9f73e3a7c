"""Quantum dynamical semigroups: generators in GKS, Lindblad and
superoperator form, complete-positivity and positivity diagnostics,
evolution, and a collection of historical master equations."""
__version__ = "0.1.0"

from .basis import OperatorBasis, expand, gell_mann_basis, reconstruct
from .cp import (
    ChoiMatrix,
    KrausSet,
    block_positivity_min,
    choi_of_superop,
    is_completely_positive,
    k_positivity_oracle,
    kraus_from_choi,
    realign,
    smr_conditions_A,
    smr_decompose,
    stinespring_dilate,
    superop_of_choi,
)
from .errors import (
    AccuracyError,
    BlockPositivityGapError,
    InvalidDimensionError,
    InvariantError,
    MissingSpectralDataError,
    NonPhysicalInputError,
    NotCompletelyPositiveError,
    NotHermiticityPreservingError,
    SemigroupForgeError,
    StiffnessError,
)
from .generators import (
    GksGenerator,
    LindbladGenerator,
    Superoperator,
    Verdict,
    gks_to_lindblad,
    gks_to_superop,
    is_gkls,
    lindblad_to_gks,
    lindblad_to_superop,
    superop_to_gks,
    to_superop,
)
from .semigroup import (
    DensityMatrix,
    Trajectory,
    cp_along_trajectory,
    evolve_exact,
    evolve_ode,
    kossakowski_positivity_check,
    propagator,
    semigroup_check,
    spectral_abscissa,
    steady_states,
)
