# pgm_bench/graph/__init__.py
# Version: 1.2.0

from .base import Dag, Edge, EdgeKind, MixedGraph, Pdag, UGraph, topological_order
from .separation import d_separated, markov_blanket, u_separated
from .structure import (apply_orientation_rules, cpdag, moralize, pdag_to_dag,
                        skeleton, v_structures)
from .chordal import cliques, is_chordal, separators

__all__ = [
    "Dag", "Edge", "EdgeKind", "MixedGraph", "Pdag", "UGraph",
    "topological_order", "u_separated", "d_separated", "markov_blanket",
    "moralize", "skeleton", "v_structures", "cpdag", "apply_orientation_rules",
    "pdag_to_dag", "is_chordal", "cliques", "separators",
]
