# pgm_bench/graph/structure.py
# Version: 1.3.0

from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Set, Tuple

from ..logging_config import logger, LogCategory
from .base import Dag, EdgeKind, MixedGraph, Pdag, UGraph, topological_order

Triple = Tuple[str, str, str]


def skeleton(g: MixedGraph) -> UGraph:
    """Ungerichtetes Gerüst: Richtungen werden ignoriert"""
    return UGraph(g.nodes, ((e.tail, e.head) for e in g.edges))


def moralize(g: Dag) -> UGraph:
    """Moralgraph: Eltern eines gemeinsamen Kindes werden verbunden"""
    pairs = {frozenset((e.tail, e.head)) for e in g.edges}
    for node in g.nodes:
        for a, b in combinations(sorted(g.parents(node)), 2):
            pairs.add(frozenset((a, b)))
    return UGraph(g.nodes, (tuple(sorted(p)) for p in pairs))


def v_structures(g: MixedGraph) -> FrozenSet[Triple]:
    """Alle (a, c, b) mit a -> c <- b, a und b nicht adjazent, a < b"""
    found = set()
    for c in g.nodes:
        for a, b in combinations(sorted(g.parents(c)), 2):
            if not g.is_adjacent(a, b):
                found.add((a, c, b))
    return frozenset(found)


class _PartialOrientation:
    """Veränderlicher Arbeitszustand für die Orientierungsregeln"""

    def __init__(self, nodes: Iterable[str], arcs: Iterable[Tuple[str, str]],
                 undirected: Iterable[Iterable[str]]):
        self.nodes = list(nodes)
        self.parents: Dict[str, Set[str]] = {v: set() for v in self.nodes}
        self.children: Dict[str, Set[str]] = {v: set() for v in self.nodes}
        self.neighbours: Dict[str, Set[str]] = {v: set() for v in self.nodes}
        for a, b in arcs:
            self.parents[b].add(a)
            self.children[a].add(b)
        for pair in undirected:
            a, b = tuple(pair)
            self.neighbours[a].add(b)
            self.neighbours[b].add(a)

    def adjacent(self, a: str, b: str) -> bool:
        return b in self.parents[a] or b in self.children[a] or b in self.neighbours[a]

    def has_path(self, source: str, target: str) -> bool:
        seen = {source}
        stack = [source]
        while stack:
            v = stack.pop()
            for c in self.children[v]:
                if c == target:
                    return True
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return False

    def orient(self, tail: str, head: str) -> None:
        self.neighbours[tail].discard(head)
        self.neighbours[head].discard(tail)
        self.children[tail].add(head)
        self.parents[head].add(tail)

    def undirected_pairs(self) -> List[Tuple[str, str]]:
        return sorted({tuple(sorted((a, b))) for a in self.nodes for b in self.neighbours[a]})

    def arcs(self) -> List[Tuple[str, str]]:
        return sorted((a, b) for a in self.nodes for b in self.children[a])

    # Regel 1: w -> x - y, w und y nicht adjazent  =>  x -> y
    def _rule1(self, x: str, y: str) -> bool:
        return any(not self.adjacent(w, y) for w in self.parents[x] if w != y)

    # Regel 2: x -> w -> y und x - y  =>  x -> y
    def _rule2(self, x: str, y: str) -> bool:
        return any(y in self.children[w] for w in self.children[x])

    # Regel 3: x - w, x - z, w -> y, z -> y, w und z nicht adjazent  =>  x -> y
    def _rule3(self, x: str, y: str) -> bool:
        candidates = sorted(w for w in self.neighbours[x] if w in self.parents[y])
        return any(not self.adjacent(w, z) for w, z in combinations(candidates, 2))

    def propagate(self) -> None:
        changed = True
        while changed:
            changed = False
            for a, b in self.undirected_pairs():
                if b not in self.neighbours[a]:
                    continue
                for x, y in ((a, b), (b, a)):
                    if (self._rule1(x, y) or self._rule2(x, y) or self._rule3(x, y)) \
                            and not self.has_path(y, x):
                        self.orient(x, y)
                        changed = True
                        break


def apply_orientation_rules(nodes: Iterable[str], arcs: Iterable[Tuple[str, str]],
                            undirected: Iterable[Iterable[str]]) -> Pdag:
    """Wendet die drei lokalen Orientierungsregeln bis zum Fixpunkt an.

    Es entstehen weder neue v-Strukturen noch gerichtete Zyklen.
    """
    nodes = list(nodes)
    state = _PartialOrientation(nodes, arcs, undirected)
    state.propagate()
    edges = [(a, b) for a, b in state.arcs()]
    edges += [(a, b, EdgeKind.UNDIRECTED) for a, b in state.undirected_pairs()]
    return Pdag(nodes, edges)


def cpdag(g: Dag) -> Pdag:
    """Repräsentant der Äquivalenzklasse: genau die zwingenden Kanten sind gerichtet"""
    compelled = set()
    for a, c, b in v_structures(g):
        compelled.add((a, c))
        compelled.add((b, c))
    undirected = [(e.tail, e.head) for e in g.edges if (e.tail, e.head) not in compelled]
    return apply_orientation_rules(g.nodes, compelled, undirected)


def pdag_to_dag(pdag: MixedGraph) -> Dag:
    """Konsistente DAG-Erweiterung eines PDAG (Dor/Tarsi).

    Ist keine Erweiterung ohne neue v-Strukturen möglich, werden die restlichen
    ungerichteten Kanten entlang einer topologischen Ordnung gerichtet.
    """
    arcs = set(pdag.arcs)
    undirected = {frozenset(p) for p in pdag.undirected_edges}
    result = set(arcs)
    remaining = set(pdag.nodes)

    def adjacent(a, b):
        return (a, b) in arcs or (b, a) in arcs or frozenset((a, b)) in undirected

    while remaining:
        chosen = None
        for x in sorted(remaining):
            if any((x, y) in arcs for y in remaining):
                continue
            und_nbrs = [y for y in remaining if frozenset((x, y)) in undirected]
            adj = [y for y in remaining if y != x and adjacent(x, y)]
            if all(adjacent(y, z) for y in und_nbrs for z in adj if z != y):
                chosen = (x, und_nbrs)
                break
        if chosen is None:
            break
        x, und_nbrs = chosen
        for y in und_nbrs:
            result.add((y, x))
        remaining.discard(x)

    if remaining:
        logger.warning("PDAG hat keine konsistente DAG-Erweiterung, richte Restkanten topologisch aus",
                       LogCategory.GRAPH)
        order = topological_order(Dag(pdag.nodes, sorted(result)))
        rank = {v: i for i, v in enumerate(order)}
        for pair in sorted(undirected, key=sorted):
            a, b = sorted(pair)
            if a in remaining and b in remaining and (a, b) not in result and (b, a) not in result:
                result.add((a, b) if rank[a] < rank[b] else (b, a))
                order = topological_order(Dag(pdag.nodes, sorted(result)))
                rank = {v: i for i, v in enumerate(order)}
    return Dag(pdag.nodes, sorted(result))
