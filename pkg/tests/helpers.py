# tests/helpers.py
# Version: 1.0.0

import itertools
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import networkx as nx
import numpy as np

from pgm_bench.data import Dataset, discrete
from pgm_bench.graph import Dag, d_separated
from pgm_bench.params import BayesianNetwork, Cpt, joint_probability

YES_NO = ("yes", "no")


# =========== Graphen ===========

def all_dags(nodes: Sequence[str]) -> List[Dag]:
    """Alle DAGs über nodes (jedes Paar: keine Kante, a -> b oder b -> a)"""
    pairs = list(itertools.combinations(nodes, 2))
    result = []
    for choice in itertools.product((0, 1, 2), repeat=len(pairs)):
        arcs = [(a, b) if c == 1 else (b, a) for (a, b), c in zip(pairs, choice) if c]
        g = nx.DiGraph(arcs)
        g.add_nodes_from(nodes)
        if nx.is_directed_acyclic_graph(g):
            result.append(Dag(nodes, arcs))
    return result


def random_dag(rng: np.random.Generator, nodes: Sequence[str], density: float = 0.5) -> Dag:
    order = list(nodes)
    rng.shuffle(order)
    arcs = [(a, b) for i, a in enumerate(order) for b in order[i + 1:] if rng.random() < density]
    return Dag(nodes, arcs)


def brute_force_d_separated(g: Dag, a: Iterable[str], b: Iterable[str], c: Iterable[str]) -> bool:
    """Prüft jeden einfachen Pfad im Gerüst auf Blockierung"""
    A, B, C = set(a), set(b), set(c)
    observed_below = {v for v in g.nodes if v in C or (g.descendants(v) & C)}
    skeleton = g.to_networkx()
    for source in A:
        for target in B:
            for path in nx.all_simple_paths(skeleton, source, target):
                blocked = False
                for left, mid, right in zip(path, path[1:], path[2:]):
                    collider = g.has_arc(left, mid) and g.has_arc(right, mid)
                    if collider and mid not in observed_below:
                        blocked = True
                    if not collider and mid in C:
                        blocked = True
                    if blocked:
                        break
                if not blocked:
                    return False
    return True


def component_u_separated(g, a: Iterable[str], b: Iterable[str], c: Iterable[str]) -> bool:
    reduced = g.to_networkx()
    reduced.remove_nodes_from(set(c))
    return not any(nx.has_path(reduced, x, y) for x in a for y in b)


class DSeparationOracle:
    """Unabhängigkeitstest, der d-Separation im wahren DAG abfragt"""

    def __init__(self, dag: Dag):
        self.dag = dag
        self.calls = 0

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.dag.nodes

    def pvalue(self, x: str, y: str, given: Iterable[str] = ()) -> float:
        self.calls += 1
        return 1.0 if d_separated(self.dag, x, y, tuple(given)) else 0.0


# =========== Netze ===========

def cpt(node: str, parents: Sequence[str], rows: Sequence[Sequence[float]],
        levels: Mapping[str, Sequence[str]] = None) -> Cpt:
    """CPT mit Stufen yes/no, sofern nicht anders angegeben; Zeilen in C-Reihenfolge der Eltern"""
    levels = levels or {}
    own = tuple(levels.get(node, YES_NO))
    parent_levels = tuple(tuple(levels.get(p, YES_NO)) for p in parents)
    return Cpt(node, tuple(parents), own, parent_levels, np.array(rows, dtype=float))


def network(arcs: Sequence[Tuple[str, str]], cpts: Sequence[Cpt], nodes: Sequence[str] = None) -> BayesianNetwork:
    nodes = nodes or [c.node for c in cpts]
    return BayesianNetwork(Dag(nodes, arcs), {c.node: c for c in cpts})


def random_network(rng: np.random.Generator, dag: Dag, card: int = 2) -> BayesianNetwork:
    levels = tuple(f"s{i}" for i in range(card))
    locals_ = {}
    for node in dag.nodes:
        parents = tuple(sorted(dag.parents(node)))
        q = card ** len(parents)
        table = rng.dirichlet(np.ones(card), size=q)
        # Zeilensummen exakt auf 1 bringen
        table[:, -1] = 1.0 - table[:, :-1].sum(axis=1)
        table = np.clip(table, 0.0, 1.0)
        locals_[node] = Cpt(node, parents, levels, tuple(levels for _ in parents), table)
    return BayesianNetwork(dag, locals_)


def exact_joint(bn: BayesianNetwork) -> Tuple[Tuple[str, ...], np.ndarray]:
    """Vollständige gemeinsame Verteilung durch Aufzählung, Achsen in bn.nodes-Reihenfolge"""
    nodes = bn.nodes
    cards = [len(bn.levels(v)) for v in nodes]
    joint = np.empty(cards)
    for combo in itertools.product(*(range(c) for c in cards)):
        joint[combo] = joint_probability(bn, dict(zip(nodes, combo)))
    return nodes, joint


def conditional_from_joint(nodes: Sequence[str], joint: np.ndarray, query: Sequence[str],
                           evidence: Mapping[str, int]) -> np.ndarray:
    table = joint
    for v, idx in evidence.items():
        sl = [slice(None)] * table.ndim
        sl[nodes.index(v)] = slice(idx, idx + 1)
        table = table[tuple(sl)]
    drop = tuple(i for i, v in enumerate(nodes) if v not in query)
    table = table.sum(axis=drop, keepdims=False) if drop else table
    kept = [v for v in nodes if v in query]
    table = np.transpose(table, [kept.index(q) for q in query])
    return table / table.sum()


def cmi_from_joint(nodes: Sequence[str], joint: np.ndarray, x: str, y: str, given: Sequence[str]) -> float:
    keep = [x, y] + list(given)
    drop = tuple(i for i, v in enumerate(nodes) if v not in keep)
    p = joint.sum(axis=drop) if drop else joint
    kept = [v for v in nodes if v in keep]
    p = np.transpose(p, [kept.index(v) for v in keep]).reshape(p.shape[kept.index(x)], p.shape[kept.index(y)], -1)
    pz = p.sum(axis=(0, 1))
    pxz = p.sum(axis=1)
    pyz = p.sum(axis=0)
    total = 0.0
    for i, j, k in itertools.product(*(range(s) for s in p.shape)):
        if p[i, j, k] > 0:
            total += p[i, j, k] * np.log(p[i, j, k] * pz[k] / (pxz[i, k] * pyz[j, k]))
    return float(total)


# =========== Fixtures ===========

def serial_network(strong: float = 0.9) -> BayesianNetwork:
    """A -> C -> B"""
    weak = 1.0 - strong
    return network([("A", "C"), ("C", "B")], [
        cpt("A", (), [[0.5, 0.5]]),
        cpt("C", ("A",), [[strong, weak], [weak, strong]]),
        cpt("B", ("C",), [[strong, weak], [weak, strong]]),
    ], nodes=["A", "B", "C"])


def diverging_network(strong: float = 0.9) -> BayesianNetwork:
    """A <- C -> B"""
    weak = 1.0 - strong
    return network([("C", "A"), ("C", "B")], [
        cpt("C", (), [[0.5, 0.5]]),
        cpt("A", ("C",), [[strong, weak], [weak, strong]]),
        cpt("B", ("C",), [[strong, weak], [weak, strong]]),
    ], nodes=["A", "B", "C"])


def converging_network() -> BayesianNetwork:
    """A -> C <- B; C hängt stark von beiden Eltern ab"""
    return network([("A", "C"), ("B", "C")], [
        cpt("A", (), [[0.5, 0.5]]),
        cpt("B", (), [[0.5, 0.5]]),
        cpt("C", ("A", "B"), [[0.95, 0.05], [0.5, 0.5], [0.5, 0.5], [0.05, 0.95]]),
    ], nodes=["A", "B", "C"])


def asia_network() -> BayesianNetwork:
    """Acht Knoten: Reise, Rauchen, Tuberkulose, Lungenkrebs, Bronchitis, either, Röntgen, Atemnot"""
    arcs = [("asia", "tub"), ("smoke", "lung"), ("smoke", "bronc"), ("tub", "either"), ("lung", "either"),
            ("either", "xray"), ("either", "dysp"), ("bronc", "dysp")]
    return network(arcs, [
        cpt("asia", (), [[0.01, 0.99]]),
        cpt("smoke", (), [[0.5, 0.5]]),
        cpt("tub", ("asia",), [[0.05, 0.95], [0.01, 0.99]]),
        cpt("lung", ("smoke",), [[0.1, 0.9], [0.01, 0.99]]),
        cpt("bronc", ("smoke",), [[0.6, 0.4], [0.3, 0.7]]),
        cpt("either", ("lung", "tub"), [[1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
        cpt("xray", ("either",), [[0.98, 0.02], [0.05, 0.95]]),
        cpt("dysp", ("bronc", "either"), [[0.9, 0.1], [0.8, 0.2], [0.7, 0.3], [0.1, 0.9]]),
    ], nodes=["asia", "bronc", "dysp", "either", "lung", "smoke", "tub", "xray"])


MARKS_SUBJECTS = ("mechanics", "vectors", "algebra", "analysis", "statistics")
MARKS_EDGES = [("mechanics", "vectors"), ("mechanics", "algebra"), ("vectors", "algebra"),
               ("algebra", "analysis"), ("algebra", "statistics"), ("analysis", "statistics")]


def marks_like_data(n: int = 200, seed: int = 0) -> Dataset:
    """Prüfungsnoten mit Algebra als zentraler Variable (zwei Dreiecke)"""
    rng = np.random.default_rng(seed)
    algebra = rng.normal(50, 10, n)
    mechanics = 0.6 * algebra + rng.normal(0, 8, n)
    vectors = 0.5 * algebra + 0.4 * mechanics + rng.normal(0, 8, n)
    analysis = 0.7 * algebra + rng.normal(0, 8, n)
    statistics = 0.5 * algebra + 0.5 * analysis + rng.normal(0, 8, n)
    from pgm_bench.data import continuous
    columns = dict(mechanics=mechanics, vectors=vectors, algebra=algebra, analysis=analysis, statistics=statistics)
    return Dataset([continuous(name) for name in MARKS_SUBJECTS], columns)


def discrete_dataset(columns: Mapping[str, Sequence[str]], levels: Mapping[str, Sequence[str]] = None) -> Dataset:
    """Diskreter Datensatz aus Stufenbezeichnungen; Stufen sortiert, sofern nicht angegeben"""
    levels = levels or {}
    metas = [discrete(name, levels.get(name) or sorted(set(values))) for name, values in columns.items()]
    return Dataset.from_labels(metas, columns)


def balanced_factorial(n_vars: int, repeats: int) -> Dict[str, List[str]]:
    """Vollfaktorielle, exakt unabhängige Binärspalten"""
    combos = list(itertools.product(("a", "b"), repeat=n_vars)) * repeats
    return {f"V{i + 1}": [c[i] for c in combos] for i in range(n_vars)}
