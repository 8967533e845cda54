"""Structure learning for linear SEMs whose weighted adjacency matrix is low rank.

The package provides the graph model and graphical rank bounds
(:mod:`lowrankdag.graph`), random DAG generators including a generator with
a specified maximum rank (:mod:`lowrankdag.generate`), linear SEM sampling
(:mod:`lowrankdag.sem`), the augmented-Lagrangian solver with an optional
low-rank factorization (:mod:`lowrankdag.solver`), structure-recovery
metrics (:mod:`lowrankdag.metrics`), and a command-line interface
(:mod:`lowrankdag.cli`).
"""

from .graph import (
    AcyclicityCheck,
    CyclicGraphError,
    Dag,
    HeadTailCover,
    LevelDecomposition,
    LevelUpperBounds,
    RankBounds,
    WeightedDag,
    is_head_tail_cover,
    level_upper_bounds,
    levels,
    max_rank,
    min_head_tail_cover,
    numeric_rank,
    rank_bounds,
    rank_lower_bounds,
    read_edge_list,
    topological_order,
    validate_acyclic,
    write_edge_list,
)
from .generate import (
    GenConfig,
    assign_weights,
    gen_erdos_renyi,
    gen_rank_specified,
    gen_scale_free,
)
from .metrics import MetricsReport, aggregate, iqr_filter, shd, tpr_fdr
from .sem import Dataset, simulate_linear
from .solver import (
    FitResult,
    InnerResult,
    SolverConfig,
    acyclicity_h,
    augmented_lagrangian,
    augmented_lagrangian_factors,
    factor_gradients,
    fit,
    inner_minimize,
    loss_ls,
    matrix_exp,
    nuclear_norm,
    prune_refit,
    threshold,
)

__version__ = "0.1.0"

__all__ = [
    "AcyclicityCheck", "CyclicGraphError", "Dag", "Dataset", "FitResult",
    "GenConfig", "HeadTailCover", "InnerResult", "LevelDecomposition",
    "LevelUpperBounds", "MetricsReport", "RankBounds", "SolverConfig",
    "WeightedDag", "acyclicity_h", "aggregate", "assign_weights",
    "augmented_lagrangian", "augmented_lagrangian_factors", "factor_gradients",
    "fit", "gen_erdos_renyi", "gen_rank_specified", "gen_scale_free",
    "inner_minimize", "iqr_filter", "is_head_tail_cover", "level_upper_bounds",
    "levels", "loss_ls", "matrix_exp", "max_rank", "min_head_tail_cover",
    "numeric_rank", "nuclear_norm", "prune_refit", "rank_bounds",
    "rank_lower_bounds", "read_edge_list", "shd", "simulate_linear",
    "threshold", "topological_order", "tpr_fdr", "validate_acyclic",
    "write_edge_list",
]
