# pgm_bench/graph/chordal.py
# Version: 1.0.1

from itertools import combinations
from typing import FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx

from .base import MixedGraph


def _maximum_cardinality_search(g: MixedGraph) -> List[str]:
    """Besuchsreihenfolge der Maximum-Cardinality-Search, Gleichstand nach Name"""
    weight = {v: 0 for v in g.nodes}
    unnumbered = set(g.nodes)
    visit: List[str] = []
    while unnumbered:
        v = min(unnumbered, key=lambda u: (-weight[u], u))
        visit.append(v)
        unnumbered.discard(v)
        for w in g.adjacent(v):
            if w in unnumbered:
                weight[w] += 1
    return visit


def _earlier_neighbours(g: MixedGraph, visit: Sequence[str]):
    position = {v: i for i, v in enumerate(visit)}
    return {v: frozenset(u for u in g.adjacent(v) if position[u] < position[v]) for v in visit}


def is_chordal(g: MixedGraph) -> Tuple[bool, Optional[Tuple[str, ...]]]:
    """Prüft Chordalität; liefert bei Erfolg eine perfekte Eliminationsordnung"""
    visit = _maximum_cardinality_search(g)
    earlier = _earlier_neighbours(g, visit)
    for v in visit:
        for a, b in combinations(sorted(earlier[v]), 2):
            if not g.is_adjacent(a, b):
                return False, None
    return True, tuple(reversed(visit))


def cliques(g: MixedGraph) -> Tuple[FrozenSet[str], ...]:
    """Maximale Cliquen.

    Bei chordalen Graphen in einer Reihenfolge mit Running-Intersection-
    Eigenschaft, sonst sortiert nach den Knotennamen.
    """
    chordal, elimination = is_chordal(g)
    if not chordal:
        found = [frozenset(c) for c in nx.find_cliques(g.to_networkx())]
        return tuple(sorted(found, key=lambda c: sorted(c)))

    visit = list(reversed(elimination))
    earlier = _earlier_neighbours(g, visit)
    candidates = [earlier[v] | {v} for v in visit]
    result: List[FrozenSet[str]] = []
    for cand in candidates:
        if any(cand < other for other in candidates):
            continue
        result.append(frozenset(cand))
    return tuple(result)


def separators(clique_list: Sequence[FrozenSet[str]]) -> Tuple[FrozenSet[str], ...]:
    """S_i = C_i geschnitten mit der Vereinigung aller früheren Cliquen"""
    seen = set()
    result = []
    for c in clique_list:
        result.append(frozenset(c & seen))
        seen |= c
    return tuple(result)
