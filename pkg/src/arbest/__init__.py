"""Sublinear-time arboricity estimation in the incidence-list query model."""

from arbest.graph import (
    BudgetExhausted,
    EdgeListError,
    Graph,
    QueryOracle,
    read_edge_list,
    write_edge_list,
)
from arbest.generators import GraphFamilySpec, generate
from arbest.exact import (
    DenseCore,
    LayerConstants,
    Layering,
    arboricity_bruteforce,
    degeneracy,
    dense_core,
    exact_layering,
)
from arbest.peeling import (
    PeelConfig,
    PeelDecision,
    PeelMemo,
    Reason,
    Verdict,
    peel,
    peel_vertex,
    peel_with_reduced_error,
)
from arbest.estimate import EstimateReport, estimate_arboricity

__all__ = [
    "BudgetExhausted",
    "DenseCore",
    "EdgeListError",
    "EstimateReport",
    "Graph",
    "GraphFamilySpec",
    "LayerConstants",
    "Layering",
    "PeelConfig",
    "PeelDecision",
    "PeelMemo",
    "QueryOracle",
    "Reason",
    "Verdict",
    "arboricity_bruteforce",
    "degeneracy",
    "dense_core",
    "estimate_arboricity",
    "exact_layering",
    "generate",
    "peel",
    "peel_vertex",
    "peel_with_reduced_error",
    "read_edge_list",
    "write_edge_list",
]

__version__ = "0.1.0"
