# pgm_bench/graph/base.py
# Version: 1.3.0

import heapq
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import networkx as nx

from ..exceptions import ArgumentError, StructuralError


class EdgeKind(str, Enum):
    """Art einer Kante"""
    DIRECTED = "directed"
    UNDIRECTED = "undirected"


@dataclass(frozen=True, order=True)
class Edge:
    """Kante zwischen zwei Knoten; ungerichtete Kanten sind kanonisch (tail < head)"""
    tail: str
    head: str
    kind: EdgeKind = EdgeKind.DIRECTED

    @property
    def pair(self) -> FrozenSet[str]:
        return frozenset((self.tail, self.head))

    @property
    def directed(self) -> bool:
        return self.kind == EdgeKind.DIRECTED


EdgeLike = Union[Edge, Tuple[str, str], Tuple[str, str, Union[str, EdgeKind]]]


def _coerce_edge(raw: EdgeLike) -> Edge:
    if isinstance(raw, Edge):
        edge = raw
    else:
        raw = tuple(raw)
        if len(raw) == 2:
            edge = Edge(raw[0], raw[1], EdgeKind.DIRECTED)
        elif len(raw) == 3:
            try:
                kind = EdgeKind(raw[2])
            except ValueError:
                raise ArgumentError(f"Unbekannte Kantenart '{raw[2]}'")
            edge = Edge(raw[0], raw[1], kind)
        else:
            raise ArgumentError(f"Kante {raw!r} hat kein gültiges Format")
    if edge.kind == EdgeKind.UNDIRECTED and edge.head < edge.tail:
        edge = Edge(edge.head, edge.tail, EdgeKind.UNDIRECTED)
    return edge


class MixedGraph:
    """Graph mit gerichteten und ungerichteten Kanten.

    Unveränderlich nach der Konstruktion; alle Änderungsmethoden liefern
    einen neuen Graphen derselben Klasse.
    """

    def __init__(self, nodes: Iterable[str], edges: Iterable[EdgeLike] = ()):
        node_list: List[str] = []
        seen = set()
        for node in nodes:
            if not isinstance(node, str) or not node:
                raise ArgumentError(f"Ungültiger Knotenname {node!r}")
            if node in seen:
                raise ArgumentError(f"Knoten '{node}' ist doppelt vorhanden")
            seen.add(node)
            node_list.append(node)
        self._nodes: Tuple[str, ...] = tuple(node_list)
        self._node_set = frozenset(node_list)

        by_pair: Dict[FrozenSet[str], Edge] = {}
        for raw in edges:
            edge = _coerce_edge(raw)
            for end in (edge.tail, edge.head):
                if end not in self._node_set:
                    raise ArgumentError(f"Kante {edge.tail}-{edge.head}: unbekannter Knoten '{end}'")
            if edge.tail == edge.head:
                raise ArgumentError(f"Schleife an Knoten '{edge.tail}' ist nicht erlaubt")
            existing = by_pair.get(edge.pair)
            if existing is not None and existing != edge:
                raise ArgumentError(f"Mehr als eine Kante zwischen '{edge.tail}' und '{edge.head}'")
            by_pair[edge.pair] = edge
        self._edges: FrozenSet[Edge] = frozenset(by_pair.values())
        self._by_pair = by_pair

        parents: Dict[str, set] = {v: set() for v in self._nodes}
        children: Dict[str, set] = {v: set() for v in self._nodes}
        neighbours: Dict[str, set] = {v: set() for v in self._nodes}
        for edge in self._edges:
            if edge.directed:
                parents[edge.head].add(edge.tail)
                children[edge.tail].add(edge.head)
            else:
                neighbours[edge.tail].add(edge.head)
                neighbours[edge.head].add(edge.tail)
        self._parents = {v: frozenset(s) for v, s in parents.items()}
        self._children = {v: frozenset(s) for v, s in children.items()}
        self._neighbours = {v: frozenset(s) for v, s in neighbours.items()}
        self._digraph: Optional[nx.DiGraph] = None

        self._validate()

    def _validate(self):
        """Hook für Unterklassen, kann bei Bedarf überschrieben werden."""
        pass

    # =========== Zugriff ===========

    @property
    def nodes(self) -> Tuple[str, ...]:
        return self._nodes

    @property
    def edges(self) -> FrozenSet[Edge]:
        return self._edges

    @property
    def arcs(self) -> Tuple[Tuple[str, str], ...]:
        """Gerichtete Kanten, sortiert"""
        return tuple(sorted((e.tail, e.head) for e in self._edges if e.directed))

    @property
    def undirected_edges(self) -> Tuple[Tuple[str, str], ...]:
        """Ungerichtete Kanten, sortiert und kanonisch"""
        return tuple(sorted((e.tail, e.head) for e in self._edges if not e.directed))

    def _check_node(self, node: str) -> None:
        if node not in self._node_set:
            raise ArgumentError(f"Unbekannter Knoten '{node}'")

    def parents(self, node: str) -> FrozenSet[str]:
        self._check_node(node)
        return self._parents[node]

    def children(self, node: str) -> FrozenSet[str]:
        self._check_node(node)
        return self._children[node]

    def neighbours(self, node: str) -> FrozenSet[str]:
        """Nachbarn über ungerichtete Kanten"""
        self._check_node(node)
        return self._neighbours[node]

    def adjacent(self, node: str) -> FrozenSet[str]:
        """Alle adjazenten Knoten, unabhängig von der Kantenart"""
        self._check_node(node)
        return self._parents[node] | self._children[node] | self._neighbours[node]

    def is_adjacent(self, a: str, b: str) -> bool:
        return frozenset((a, b)) in self._by_pair

    def edge_between(self, a: str, b: str) -> Optional[Edge]:
        return self._by_pair.get(frozenset((a, b)))

    def has_arc(self, tail: str, head: str) -> bool:
        edge = self._by_pair.get(frozenset((tail, head)))
        return edge is not None and edge.directed and edge.tail == tail

    def has_undirected(self, a: str, b: str) -> bool:
        edge = self._by_pair.get(frozenset((a, b)))
        return edge is not None and not edge.directed

    def _directed_view(self) -> nx.DiGraph:
        # einmal erzeugt, der Graph ist unveränderlich
        if self._digraph is None:
            self._digraph = self.to_networkx_directed()
        return self._digraph

    def descendants(self, node: str) -> FrozenSet[str]:
        """Über gerichtete Pfade erreichbare Knoten (ohne node selbst)"""
        self._check_node(node)
        return frozenset(nx.descendants(self._directed_view(), node))

    def ancestors(self, node: str) -> FrozenSet[str]:
        self._check_node(node)
        return frozenset(nx.ancestors(self._directed_view(), node))

    # =========== Ableitungen ===========

    def _rebuild(self, edges: Iterable[EdgeLike]) -> 'MixedGraph':
        return type(self)(self._nodes, edges)

    def add_edge(self, tail: str, head: str, kind: EdgeKind = EdgeKind.DIRECTED) -> 'MixedGraph':
        return self._rebuild(list(self._edges) + [Edge(tail, head, kind)])

    def remove_edge(self, a: str, b: str) -> 'MixedGraph':
        edge = self.edge_between(a, b)
        if edge is None:
            raise ArgumentError(f"Keine Kante zwischen '{a}' und '{b}'")
        return self._rebuild(e for e in self._edges if e != edge)

    def reverse_arc(self, tail: str, head: str) -> 'MixedGraph':
        if not self.has_arc(tail, head):
            raise ArgumentError(f"Keine gerichtete Kante {tail} -> {head}")
        edges = [e for e in self._edges if e.pair != frozenset((tail, head))]
        edges.append(Edge(head, tail, EdgeKind.DIRECTED))
        return self._rebuild(edges)

    def subgraph(self, nodes: Iterable[str]) -> 'MixedGraph':
        wanted = set(nodes)
        keep = [v for v in self._nodes if v in wanted]
        kept = set(keep)
        return type(self)(keep, [e for e in self._edges if e.tail in kept and e.head in kept])

    def encoding(self) -> Tuple[Tuple[str, ...], Tuple[Tuple[str, str, str], ...]]:
        """Deterministische, sortierbare Darstellung"""
        return (tuple(sorted(self._nodes)),
                tuple(sorted((e.tail, e.head, e.kind.value) for e in self._edges)))

    def to_networkx(self) -> nx.Graph:
        """Ungerichtete networkx-Sicht auf alle Kanten"""
        g = nx.Graph()
        g.add_nodes_from(self._nodes)
        g.add_edges_from((e.tail, e.head) for e in self._edges)
        return g

    def to_networkx_directed(self) -> nx.DiGraph:
        """Gerichteter Teil als networkx-DiGraph"""
        g = nx.DiGraph()
        g.add_nodes_from(self._nodes)
        g.add_edges_from((e.tail, e.head) for e in self._edges if e.directed)
        return g

    # =========== Python-Protokolle ===========

    def __contains__(self, node) -> bool:
        return node in self._node_set

    def __iter__(self) -> Iterator[str]:
        return iter(self._nodes)

    def __len__(self) -> int:
        return len(self._nodes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MixedGraph):
            return NotImplemented
        return self._node_set == other._node_set and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._node_set, self._edges))

    def __repr__(self) -> str:
        parts = [f"{a}->{b}" for a, b in self.arcs] + [f"{a}-{b}" for a, b in self.undirected_edges]
        return f"{type(self).__name__}(nodes={list(self._nodes)}, edges=[{', '.join(parts)}])"


class Dag(MixedGraph):
    """Gerichteter azyklischer Graph"""

    def _validate(self):
        if any(not e.directed for e in self._edges):
            raise ArgumentError("Ein DAG darf keine ungerichteten Kanten enthalten")
        topological_order(self)


class UGraph(MixedGraph):
    """Ungerichteter Graph"""

    def __init__(self, nodes: Iterable[str], edges: Iterable[EdgeLike] = ()):
        super().__init__(nodes, (_as_undirected(e) for e in edges))

    def _validate(self):
        if any(e.directed for e in self._edges):
            raise ArgumentError("Ein ungerichteter Graph darf keine gerichteten Kanten enthalten")


class Pdag(MixedGraph):
    """Teilweise gerichteter Graph mit azyklischem gerichtetem Teil"""

    def _validate(self):
        topological_order(self)


def _as_undirected(raw: EdgeLike) -> Edge:
    if isinstance(raw, Edge):
        return Edge(raw.tail, raw.head, EdgeKind.UNDIRECTED) if raw.directed else raw
    raw = tuple(raw)
    return Edge(raw[0], raw[1], EdgeKind.UNDIRECTED)


def topological_order(g: MixedGraph) -> List[str]:
    """Topologische Ordnung des gerichteten Teils, Gleichstand nach Knotenname.

    :raises StructuralError: wenn ein gerichteter Zyklus existiert
    """
    indegree = {v: len(g._parents[v]) for v in g.nodes}
    heap = [v for v in g.nodes if indegree[v] == 0]
    heapq.heapify(heap)
    order: List[str] = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for c in g._children[v]:
            indegree[c] -= 1
            if indegree[c] == 0:
                heapq.heappush(heap, c)
    if len(order) < len(g.nodes):
        remaining = [v for v in g.nodes if indegree[v] > 0]
        raise StructuralError("Gerichteter Zyklus gefunden", _find_cycle(g, remaining))
    return order


def _find_cycle(g: MixedGraph, nodes: Sequence[str]) -> List[str]:
    sub = nx.DiGraph()
    keep = set(nodes)
    sub.add_nodes_from(sorted(keep))
    sub.add_edges_from((e.tail, e.head) for e in g.edges if e.directed and e.tail in keep and e.head in keep)
    try:
        cycle_edges = nx.find_cycle(sub)
    except nx.NetworkXNoCycle:
        return sorted(keep)
    return [u for u, _ in cycle_edges]
