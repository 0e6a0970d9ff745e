"""XXZ droplets on symmetric product graphs.

Operators on the N-particle sector, edge-isoperimetric droplet catalogs,
Schur-complement gap certificates and Combes-Thomas decay checks, all
verified against exact computations on finite graphs.
"""

from .graph_core import (
    BaseGraph,
    ConfigMeasures,
    FieldSpec,
    GraphError,
    build_lattice_window,
    compensating_boundary_field,
    config_measures,
    pair_distance,
    parse_graph,
)
from .sym_product import DimensionError, SymSpace, assignment_distance
from .xxz_operator import (
    HamiltonianSpec,
    LinearMap,
    Regularization,
    SpecError,
    StructuralError,
    build_hamiltonian,
    full_spin_hamiltonian,
    sector_blocks,
)
from .spectral import (
    SpectrumResult,
    block_resolvent_norm,
    count_below,
    dense_spectrum,
    extremal_eigs,
    spectral_projector,
)
from .isoperimetry import (
    DropletCatalog,
    analytic_minimizers,
    brute_force_surface_levels,
    chain_band,
    droplet_set,
    thresholds,
)
from .gap_certifier import GapCertificate, certify, chain_gamma, partition_by_surface, verify_certificate
from .ct_verifier import CTParams, CTReport, ct_rhs, eigenstate_decay_check, projector_decay_check, verify_ct_grid

__version__ = "0.1.0"
