"""Log gases on the sphere: critical inverse temperatures, optimizer
combinatorics, spectral bounds, closed forms, graph cross-checks and Monte
Carlo verification."""

from .coupling import (
    ChargeVector,
    CouplingMatrix,
    GraphSpec,
    SystemInput,
    TwoComponentSpec,
    from_charges,
    from_graph,
    from_matrix,
    from_two_component,
    load_system,
    parse_system,
    sample_gaussian_charges,
    sample_gaussian_couplings,
)
from .solver import (
    CriticalReport,
    Nest,
    OptResult,
    SolverOptions,
    SubsetMask,
    SupportDescription,
    brute_force_oracle,
    critical_interval,
    limit_support,
    max_nest,
    solve_both,
    solve_t_minus,
    solve_t_plus,
    subset_constraint,
    subset_sum,
)
from .spectral import BoundReport, Spectrum, charge_bounds, eig_bounds, symmetric_eigs
from .closed_forms import (
    OnsagerCritical,
    TwoComponentCritical,
    onsager_beta_minus,
    onsager_conditions,
    technical_inequality,
    two_component_critical,
)
from .graphs import (
    ArboricityReport,
    arboricity,
    forest_partition_oracle,
    sk_ground_state_check,
)
from .sphere_mc import (
    ChainParams,
    ChainResult,
    CollapseStats,
    MCEstimate,
    SphereConfiguration,
    analytic_partition_two,
    collapse_observables,
    energy,
    estimate_partition,
    metropolis_chain,
    pole_order_fit,
    sample_uniform,
)

__version__ = "0.1.0"
