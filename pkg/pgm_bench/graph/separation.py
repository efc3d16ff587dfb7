# pgm_bench/graph/separation.py
# Version: 1.1.0

from typing import FrozenSet, Iterable, Tuple, Union

import networkx as nx

from ..exceptions import ArgumentError
from .base import MixedGraph

NodeSet = Union[str, Iterable[str]]

_UP = 0      # erreicht über eine Kante vom Kind
_DOWN = 1    # erreicht über eine Kante vom Elternteil


def _as_set(nodes: NodeSet) -> FrozenSet[str]:
    if isinstance(nodes, str):
        return frozenset((nodes,))
    return frozenset(nodes or ())


def _check_sets(g: MixedGraph, a: NodeSet, b: NodeSet, c: NodeSet) -> Tuple[FrozenSet[str], ...]:
    sets = tuple(_as_set(s) for s in (a, b, c))
    for s in sets:
        for v in s:
            g._check_node(v)
    A, B, C = sets
    if not A or not B:
        raise ArgumentError("Die Mengen A und B dürfen nicht leer sein")
    if A & B or A & C or B & C:
        raise ArgumentError("Die Mengen A, B und C müssen disjunkt sein")
    return A, B, C


def u_separated(g: MixedGraph, a: NodeSet, b: NodeSet, c: NodeSet = ()) -> bool:
    """True, wenn jeder Pfad von A nach B einen Knoten aus C enthält."""
    if g.arcs:
        raise ArgumentError("u-Separation ist nur für ungerichtete Graphen definiert")
    A, B, C = _check_sets(g, a, b, c)
    reduced = g.to_networkx().subgraph(set(g.nodes) - C)
    reached = set()
    for start in sorted(A):
        if start not in reached:
            reached |= nx.node_connected_component(reduced, start)
    return not (reached & B)


def d_separated(g: MixedGraph, a: NodeSet, b: NodeSet, c: NodeSet = ()) -> bool:
    """d-Separation über Erreichbarkeit ("Bayes-Ball").

    Ein Pfad ist offen an einem Collider genau dann, wenn der Collider oder
    einer seiner Nachfahren in C liegt, und an jedem anderen Knoten genau
    dann, wenn dieser nicht in C liegt.
    """
    if g.undirected_edges:
        raise ArgumentError("d-Separation ist nur für DAGs definiert")
    A, B, C = _check_sets(g, a, b, c)

    # C und alle Vorfahren von C
    with_observed_descendant = set(C)
    stack = list(C)
    while stack:
        v = stack.pop()
        for p in g.parents(v):
            if p not in with_observed_descendant:
                with_observed_descendant.add(p)
                stack.append(p)

    visited = set()
    reachable = set()
    to_visit = [(v, _UP) for v in sorted(A)]
    while to_visit:
        v, direction = to_visit.pop()
        if (v, direction) in visited:
            continue
        visited.add((v, direction))
        if v not in C:
            reachable.add(v)
        if direction == _UP and v not in C:
            to_visit.extend((p, _UP) for p in g.parents(v))
            to_visit.extend((ch, _DOWN) for ch in g.children(v))
        elif direction == _DOWN:
            if v not in C:
                to_visit.extend((ch, _DOWN) for ch in g.children(v))
            if v in with_observed_descendant:
                to_visit.extend((p, _UP) for p in g.parents(v))
    return not (reachable & B)


def markov_blanket(g: MixedGraph, node: str) -> FrozenSet[str]:
    """Markov-Decke: Nachbarn im ungerichteten Fall, sonst Eltern, Kinder und
    die anderen Eltern der Kinder."""
    g._check_node(node)
    blanket = set(g.neighbours(node)) | set(g.parents(node)) | set(g.children(node))
    for child in g.children(node):
        blanket |= g.parents(child)
    blanket.discard(node)
    return frozenset(blanket)
