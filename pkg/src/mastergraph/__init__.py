"""Long-term behavior of finite Master equations from network structure."""

from .arborescence import (
    InTree,
    enumerate_in_trees,
    stationary_via_trees,
    tree_polynomial_via_cofactor,
)
from .connectivity import (
    Condensation,
    Connectivity,
    classify_connectivity,
    condense,
    is_absorbing,
    is_irreducible_adjacency,
    minimal_absorbing_sets,
    reach_from,
    reach_to,
)
from .dominance import (
    DominanceReport,
    RowClass,
    certify_transient_invertible,
    classify_dominance,
    transient_block,
)
from .evolution import (
    PositivityBound,
    evolve,
    positivity_lower_bound,
    solution_operator,
    spectral_sanity,
)
from .network import (
    StateNetwork,
    adjacency_matrix,
    build_generator,
    from_edges,
    parse_network,
    serialize_network,
)
from .simulation import SimulationConfig, empirical_distribution, simulate_trajectory
from .steady_state import (
    BlockPermutation,
    LimitResult,
    SteadyStateBasis,
    block_permutation,
    is_relaxing,
    kernel_dimension,
    limit_distribution,
    steady_state_basis,
)

__version__ = "0.1.0"
