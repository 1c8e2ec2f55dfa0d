"""t-sparsity number of dense random graphs: predictions, moment bounds and an exact solver."""

from .graphs import Graph, gnp_sample, is_t_sparse, read_graph, subset_stats, write_graph
from .predict import alpha_dependence, alpha_hat_sparse, concentration_interval, regime_reference
from .rates import (
    DomainError,
    RateParams,
    binom_cdf_log,
    binom_tail_bounds,
    lambda_expansion_check,
    lambda_star,
    psi_solve,
    sparse_prob,
)
from .solver import SparsityResult, greedy_peel, sparsity_bruteforce, sparsity_exact

__version__ = "0.1.0"
