"""modedge: edge-set optimization for modularity-based community structure.

Solves two problems on undirected integer-weighted networks: find a minimum
set of edges (or weight units) to add so that a given partition maximizes
Newman-Girvan modularity, and find a sparse sub-network whose optimal
partition matches the full network's. Exact solutions come from a
row-generation loop over an integer master program; fast greedy heuristics
cover instances the exact method cannot reach.
"""

from .graph import (
    Graph,
    Partition,
    EdgeDelta,
    GraphError,
    graph_from_edges,
    apply_delta,
    canonicalize,
    distance2_pairs,
)
from .modularity import (
    ModularityValue,
    modularity,
    modularity_pairwise,
    modularity_matrix,
    delta_q_within,
    delta_q_between,
    delta_v_score,
)
from .search import (
    SearchConfig,
    ExactLimitError,
    enumerate_partitions,
    maximize_modularity,
    louvain_partition,
    is_optimal,
)
from .align import ClusterMatching, match_clusters, misclassified
from .bip import BinaryProgram, LinearRow, Coupling, SolveOutcome, solve_min
from .master import (
    CandidateEdgeSet,
    DisjunctiveCut,
    build_partition_row,
    mccormick_couplings,
    derive_swap_partition,
    build_disjunctive_cuts,
    assemble_master,
)
from .rowgen import (
    RowGenConfig,
    SolveReport,
    solve_edge_addition,
    solve_sparsification,
    verify_certificate,
)
from .heuristics import (
    HeuristicConfig,
    order_misclassified,
    heuristic_edge_addition,
    heuristic_edge_removal,
    post_process,
    cross_cluster_preprocess,
    star_lower_bound,
)
from .datasets import demo_fixture, karate_graph, karate_factions, karate_optimum
from .io import (
    parse_pajek,
    parse_edge_csv,
    parse_partition_csv,
    generate_candidates,
    largest_component,
    DataError,
)

__version__ = "0.1.0"

__all__ = [
    "Graph", "Partition", "EdgeDelta", "GraphError",
    "graph_from_edges", "apply_delta", "canonicalize", "distance2_pairs",
    "ModularityValue", "modularity", "modularity_pairwise", "modularity_matrix",
    "delta_q_within", "delta_q_between", "delta_v_score",
    "SearchConfig", "ExactLimitError", "enumerate_partitions",
    "maximize_modularity", "louvain_partition", "is_optimal",
    "ClusterMatching", "match_clusters", "misclassified",
    "BinaryProgram", "LinearRow", "Coupling", "SolveOutcome", "solve_min",
    "CandidateEdgeSet", "DisjunctiveCut", "build_partition_row",
    "mccormick_couplings", "derive_swap_partition", "build_disjunctive_cuts",
    "assemble_master",
    "RowGenConfig", "SolveReport", "solve_edge_addition",
    "solve_sparsification", "verify_certificate",
    "HeuristicConfig", "order_misclassified", "heuristic_edge_addition",
    "heuristic_edge_removal", "post_process", "cross_cluster_preprocess",
    "star_lower_bound",
    "demo_fixture", "karate_graph", "karate_factions", "karate_optimum",
    "parse_pajek", "parse_edge_csv", "parse_partition_csv",
    "generate_candidates", "largest_component", "DataError",
]
