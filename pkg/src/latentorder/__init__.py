"""Simulation and estimation for networks whose edges are generated along a
latent order of node pairs."""

from .degrees import degree_histogram, poisson_tv, powerlaw_fit, tail_sets
from .dependence import chi_of_two_state, delta_closed_form, delta_empirical, k_step_conditionals
from .errors import (DegenerateChainError, InfeasibleError, InsufficientSupportError,
                     InvalidSizeError, LatentOrderError, SizeGuardError, UndefinedBlockError)
from .estimation import block_means, cls_exact, cls_heuristic, graphon_k_select, oracle_cls
from .experiments import ExperimentConfig, quantile_bands, run_experiment
from .generators import (CsbmParams, GraphonSpec, MecltgParams, derive_seed, gen_composite_graphon,
                         gen_coupled, gen_csbm, gen_erdos_renyi, gen_inhom, gen_mecltg, generate,
                         make_inhom_schedule, solve_csbm, two_group_preset, three_group_preset)
from .graph import Graph, Ordering, chain_from_graph, graph_from_chain, make_ordering
from .spectral import laplacian, misclustered_count, spectral_cluster

__version__ = "0.1.0"
