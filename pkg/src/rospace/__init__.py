"""Exact computations in relative outer space.

Free factor systems and words, marked metric graphs, graph-of-groups
trees with exact translation lengths, index and lattice invariants,
boundary simplices and systems of partial isometries.
"""

from .boundary import boundary_simplex, compare_projective, convergence_table, twist_map
from .enumeration import enumerate_maximal_agraphs, enumerate_shapes
from .errors import (AlphabetError, AuditError, DegenerateSystemError, DomainError,
                     InvariantFailure, ResourceError, RospaceError, SchemaError, StructuralError,
                     UnsupportedTree, VerificationIncomplete)
from .gog import GraphOfGroupsTree, VertexLabel, ball_oracle_length, minimalize, tree_from_point
from .graphs import (AGraph, CollapsedGraph, CWGraph, MarkedMetricAGraph, act_on_point,
                     dimension_report, point_from_collapsed, validate_agraph, validate_point)
from .invariants import (lattice_L, lattice_Lambda, q_rank_report, total_index,
                         validate_very_small, verify_prop41)
from .scalars import FormalReal, LatticeZ, lattice_contains, q_rank
from .systems import build_tk_ball, index_via_orbit_graph, resolve_point, system_from_tree
from .words import Endomap, FreeFactorSystem, Word, are_conjugate, cyclic_reduce

__version__ = "0.1.0"

__all__ = [
    "AGraph", "AlphabetError", "AuditError", "CWGraph", "CollapsedGraph", "DegenerateSystemError",
    "DomainError", "Endomap", "FormalReal", "FreeFactorSystem", "GraphOfGroupsTree",
    "InvariantFailure", "LatticeZ", "MarkedMetricAGraph", "ResourceError", "RospaceError",
    "SchemaError", "StructuralError", "UnsupportedTree", "VerificationIncomplete", "VertexLabel",
    "Word", "act_on_point", "are_conjugate", "ball_oracle_length", "boundary_simplex",
    "build_tk_ball", "compare_projective", "convergence_table", "cyclic_reduce",
    "dimension_report", "enumerate_maximal_agraphs", "enumerate_shapes", "index_via_orbit_graph",
    "lattice_L", "lattice_Lambda", "lattice_contains", "minimalize", "point_from_collapsed",
    "q_rank", "q_rank_report", "resolve_point", "system_from_tree", "total_index", "tree_from_point",
    "twist_map", "validate_agraph", "validate_point", "validate_very_small", "verify_prop41",
]
