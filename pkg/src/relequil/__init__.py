"""Linear stability of relative equilibria of the planar n-body problem
under power-law and quasi-homogeneous pair potentials, computed through
symmetry-group block diagonalization and validated against a dense
eigensolver oracle."""

from .central import (
    CentralityReport,
    RefinementError,
    is_central_configuration,
    refine_central_configuration,
    regular_polygon,
)
from .dynamics import (
    GrowthEstimate,
    Trajectory,
    estimate_growth_rate,
    integrate_rotating_frame,
)
from .model import (
    BodyConfiguration,
    CollisionError,
    NonCentralConfigurationError,
    PotentialSpec,
    Spectrum,
    angular_frequency_squared,
    moment_of_inertia,
    potential_energy,
    potential_energy_terms,
    potential_gradient,
    potential_hessian,
)
from .pipeline import (
    AnalysisRequest,
    ConsistencyError,
    InputError,
    StabilityReport,
    run_analysis,
    run_sweep,
)
from .presets import PRESET_NAMES, get_case
from .spectrum import (
    CoupledBlock,
    LinearBlock,
    StabilityVerdict,
    block_spectrum,
    build_block,
    classify,
    compare_spectra,
    decompose_blocks,
    full_linearization_spectrum,
)
from .symmetry import (
    CharacterTable,
    GroupElement,
    IsotypicDecomposition,
    PairingError,
    SymmetryGroup,
    build_polygon_symmetry_group,
    character_table,
    decompose_multiplicities,
    eigenvalues_by_trace_equations,
    isotypic_projectors,
    j_compatible_pairs,
    representation_matrix,
    verify_invariance,
)

__version__ = "0.1.0"
