"""
FCI Lattice Toolkit
===================

Exact classical ground states, Hatsugai-Kohmoto band topology, sector-averaged
Chern numbers and small-torus exact diagonalization for a square-lattice
model of a fractional Chern insulator at filling 3/8.

Modules:
    lattice: Torus geometry, sublattices and interaction displacement sets
    classical: Pair counts, ground-state enumeration, zero-energy counting
    hk: Hatsugai-Kohmoto Bloch and real-space Hamiltonians
    chern: Plaquette, loop and closed-form Chern numbers
    composite: Sector Chern vector, averaged Chern number, FCI/CDW labels
    ed: Many-body Hamiltonian, spectra, Slater Chern numbers, structure factors
    models: Data classes shared across modules
    config: Numeric limits and tolerances
    utils: Formatting and output helpers

Example usage:

    from fcilab import HKParams, TorusLattice, chern_plaquette, enumerate_ground_states

    report = enumerate_ground_states(TorusLattice(4, 4), 6)
    print(report.degeneracy)

    print(chern_plaquette(HKParams(1.0, 1.0, 1.0), grid=24))
"""

__version__ = "1.0.1"
__author__ = "Coela"

from .config import Limits, DEFAULT_LIMITS
from .lattice import (
    DisplacementSet,
    LatticeError,
    SUBLATTICES,
    TorusLattice,
    contact_matrix,
    neighbors,
    sublattice_sites,
    translation_permutation,
)
from .models import (
    ChernResult,
    CompositeReport,
    CouplingConstants,
    CurvatureMap,
    GroundStateReport,
    HKLatticeSize,
    HKParams,
    ManyBodySpectrum,
    OccupationConfig,
    PairCounts,
    PhaseDiagramRow,
    RunManifest,
    ScanReport,
    SectorSpec,
    TwistGrid,
)
from .classical import (
    BudgetExceeded,
    ClassicalError,
    WidthExceeded,
    count_min_energy_configs_dp,
    decompose_config,
    enumerate_ground_states,
    interaction_pair_counts,
    pattern_config,
    single_addition_costs,
    zero_energy_counts,
)
from .hk import (
    HKError,
    band_energies,
    band_gap,
    bloch_components,
    lower_state,
    norm_zero_point,
    realspace_hamiltonian,
    translation_operator,
)
from .chern import (
    AspectUndefined,
    ChernError,
    GaplessRefusal,
    LoopSpec,
    NonIntegerResidue,
    OutOfDerivedDomain,
    SingularPoint,
    berry_connection,
    berry_connection_asymptotic,
    chern_analytic,
    chern_loop,
    chern_plaquette,
    compute_chern,
    curvature_map,
    phase_diagram,
)
from .composite import (
    CompositeError,
    SizeNotEmbeddable,
    TotalHoppingMatrix,
    build_total_hopping,
    classify_phase,
    composite_chern,
    sector_chern,
    specs_from_params,
    translation_check,
    uniform_specs,
)
from .ed import (
    DimensionExceeded,
    EDError,
    FockBasis,
    GapClosedAtTwist,
    ManyBodyHamiltonian,
    NoConvergence,
    ScanPreconditionError,
    build_many_body,
    cluster_levels,
    composite_many_body_chern,
    low_spectrum,
    mixture_structure_factor,
    slater_chern,
    strong_coupling_scan,
    structure_factor,
)

# Errors the CLI reports with exit status 1
DOMAIN_ERRORS = (
    LatticeError,
    ClassicalError,
    HKError,
    ChernError,
    CompositeError,
    EDError,
)

__all__ = [
    'DOMAIN_ERRORS',
    'DEFAULT_LIMITS',
    'Limits',
    'DisplacementSet',
    'LatticeError',
    'SUBLATTICES',
    'TorusLattice',
    'contact_matrix',
    'neighbors',
    'sublattice_sites',
    'translation_permutation',
    'ChernResult',
    'CompositeReport',
    'CouplingConstants',
    'CurvatureMap',
    'GroundStateReport',
    'HKLatticeSize',
    'HKParams',
    'ManyBodySpectrum',
    'OccupationConfig',
    'PairCounts',
    'PhaseDiagramRow',
    'RunManifest',
    'ScanReport',
    'SectorSpec',
    'TwistGrid',
    'BudgetExceeded',
    'ClassicalError',
    'WidthExceeded',
    'count_min_energy_configs_dp',
    'decompose_config',
    'enumerate_ground_states',
    'interaction_pair_counts',
    'pattern_config',
    'single_addition_costs',
    'zero_energy_counts',
    'HKError',
    'band_energies',
    'band_gap',
    'bloch_components',
    'lower_state',
    'norm_zero_point',
    'realspace_hamiltonian',
    'translation_operator',
    'AspectUndefined',
    'ChernError',
    'GaplessRefusal',
    'LoopSpec',
    'NonIntegerResidue',
    'OutOfDerivedDomain',
    'SingularPoint',
    'berry_connection',
    'berry_connection_asymptotic',
    'chern_analytic',
    'chern_loop',
    'chern_plaquette',
    'compute_chern',
    'curvature_map',
    'phase_diagram',
    'CompositeError',
    'SizeNotEmbeddable',
    'TotalHoppingMatrix',
    'build_total_hopping',
    'classify_phase',
    'composite_chern',
    'sector_chern',
    'specs_from_params',
    'translation_check',
    'uniform_specs',
    'DimensionExceeded',
    'EDError',
    'FockBasis',
    'GapClosedAtTwist',
    'ManyBodyHamiltonian',
    'NoConvergence',
    'ScanPreconditionError',
    'build_many_body',
    'cluster_levels',
    'composite_many_body_chern',
    'low_spectrum',
    'mixture_structure_factor',
    'slater_chern',
    'strong_coupling_scan',
    'structure_factor',
]
