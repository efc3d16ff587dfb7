# pgm_bench/params.py
# Version: 1.3.0

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Mapping, Sequence, Tuple, Union

import numpy as np

from .const import DEFAULT_ISS, ROW_SUM_TOL, worker_count
from .data import Dataset, VariableMeta, continuous, contingency_table, discrete
from .exceptions import ArgumentError, CollinearityError, DecomposabilityError, DegenerateVarianceError
from .factor import Factor
from .graph import Dag, MixedGraph, cliques, is_chordal, separators, topological_order
from .logging_config import logger, LogCategory

Level = Union[str, int]


@dataclass(frozen=True)
class Cpt:
    """Bedingte Wahrscheinlichkeitstafel.

    table hat die Form (Elternkonfigurationen, Stufen des Knotens); die
    Konfigurationen laufen in C-Reihenfolge, der erste Elternknoten am langsamsten.
    """
    node: str
    parents: Tuple[str, ...]
    levels: Tuple[str, ...]
    parent_levels: Tuple[Tuple[str, ...], ...]
    table: np.ndarray
    uniform_rows: Tuple[int, ...] = ()

    def __post_init__(self):
        table = np.array(self.table, dtype=np.float64)
        q = int(np.prod([len(l) for l in self.parent_levels])) if self.parent_levels else 1
        if len(self.parent_levels) != len(self.parents):
            raise ArgumentError(f"CPT '{self.node}': Stufen für jeden Elternknoten nötig")
        if table.shape != (q, len(self.levels)):
            raise ArgumentError(f"CPT '{self.node}': Form {table.shape} erwartet ({q}, {len(self.levels)})")
        if np.any(table < 0.0) or np.any(table > 1.0):
            raise ArgumentError(f"CPT '{self.node}': Einträge außerhalb von [0, 1]")
        if np.any(np.abs(table.sum(axis=1) - 1.0) > ROW_SUM_TOL):
            raise ArgumentError(f"CPT '{self.node}': Zeilensummen weichen von 1 ab")
        table.flags.writeable = False
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "parents", tuple(self.parents))
        object.__setattr__(self, "uniform_rows", tuple(self.uniform_rows))

    @property
    def flagged(self) -> bool:
        """True, wenn mindestens eine Zeile mangels Daten gleichverteilt gesetzt wurde"""
        return bool(self.uniform_rows)

    @property
    def cards(self) -> Tuple[int, ...]:
        return tuple(len(l) for l in self.parent_levels)

    def configurations(self):
        """Elternkonfigurationen als Stufenindizes in Zeilenreihenfolge"""
        return list(np.ndindex(*self.cards)) if self.parents else [()]

    def row_index(self, parent_values: Mapping[str, Level]) -> int:
        if not self.parents:
            return 0
        idx = [level_index(self.node, p, levels, parent_values[p])
               for p, levels in zip(self.parents, self.parent_levels)]
        return int(np.ravel_multi_index(idx, self.cards))

    def probability(self, value: Level, parent_values: Mapping[str, Level]) -> float:
        return float(self.table[self.row_index(parent_values), level_index(self.node, self.node, self.levels, value)])

    def as_factor(self) -> Factor:
        """Faktor über (Eltern..., Knoten)"""
        cards = self.cards + (len(self.levels),)
        return Factor(self.parents + (self.node,), cards, self.table.reshape(cards))


@dataclass(frozen=True)
class GaussianLocal:
    """Lineare Gauß-Regression des Knotens auf seine Eltern"""
    node: str
    parents: Tuple[str, ...]
    intercept: float
    coefficients: Tuple[float, ...]
    residual_variance: float

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        if len(self.coefficients) != len(self.parents):
            raise ArgumentError(f"'{self.node}': ein Koeffizient je Elternknoten nötig")
        if not self.residual_variance > 0.0:
            raise ArgumentError(f"'{self.node}': Residualvarianz muss positiv sein")

    def mean(self, parent_values: Mapping[str, Union[float, np.ndarray]]):
        result = self.intercept
        for p, b in zip(self.parents, self.coefficients):
            result = result + b * np.asarray(parent_values[p], dtype=float)
        return result

    def log_density(self, x, parent_values) -> np.ndarray:
        resid = np.asarray(x, dtype=float) - self.mean(parent_values)
        return -0.5 * (math.log(2.0 * math.pi * self.residual_variance) + resid ** 2 / self.residual_variance)


Local = Union[Cpt, GaussianLocal]


def level_index(node: str, variable: str, levels: Sequence[str], value: Level) -> int:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        if 0 <= value < len(levels):
            return int(value)
    else:
        try:
            return list(levels).index(str(value))
        except ValueError:
            pass
    raise ArgumentError(f"'{value}' ist keine gültige Stufe von '{variable}' (Knoten '{node}')")


class BayesianNetwork:
    """DAG plus genau eine lokale Verteilung je Knoten (einheitlicher Typ)"""

    def __init__(self, dag: Dag, locals_: Mapping[str, Local]):
        self.dag = dag
        self.locals: Dict[str, Local] = {}
        for node in dag.nodes:
            if node not in locals_:
                raise ArgumentError(f"Keine lokale Verteilung für Knoten '{node}'")
            local = locals_[node]
            if set(local.parents) != set(dag.parents(node)):
                raise ArgumentError(f"Eltern der lokalen Verteilung von '{node}' passen nicht zum DAG")
            self.locals[node] = local
        extra = set(locals_) - set(dag.nodes)
        if extra:
            raise ArgumentError(f"Lokale Verteilungen für unbekannte Knoten: {sorted(extra)}")
        kinds = {isinstance(l, Cpt) for l in self.locals.values()}
        if len(kinds) > 1:
            raise ArgumentError("Gemischte diskrete und Gauß-Verteilungen werden nicht unterstützt")
        self.is_discrete = kinds != {False}
        self.order = topological_order(dag)
        if self.is_discrete:
            for node, cpt in self.locals.items():
                for p, levels in zip(cpt.parents, cpt.parent_levels):
                    if tuple(levels) != self.locals[p].levels:
                        raise ArgumentError(f"Stufen von '{p}' in der CPT von '{node}' inkonsistent")

    @property
    def nodes(self) -> Tuple[str, ...]:
        return self.dag.nodes

    def local(self, node: str) -> Local:
        try:
            return self.locals[node]
        except KeyError:
            raise ArgumentError(f"Unbekannter Knoten '{node}'")

    def variables(self) -> Tuple[VariableMeta, ...]:
        if self.is_discrete:
            return tuple(discrete(n, self.locals[n].levels) for n in self.nodes)
        return tuple(continuous(n) for n in self.nodes)

    def levels(self, node: str) -> Tuple[str, ...]:
        local = self.local(node)
        if not isinstance(local, Cpt):
            raise ArgumentError(f"Knoten '{node}' ist stetig")
        return local.levels

    @property
    def flagged_nodes(self) -> Tuple[str, ...]:
        return tuple(n for n in self.nodes if isinstance(self.locals[n], Cpt) and self.locals[n].flagged)

    def __repr__(self) -> str:
        kind = "diskret" if self.is_discrete else "gauss"
        return f"BayesianNetwork({len(self.nodes)} Knoten, {len(self.dag.arcs)} Kanten, {kind})"


# =========== Schätzung ===========

def fit_cpt(d: Dataset, node: str, parents: Sequence[str] = (), iss: float = DEFAULT_ISS) -> Cpt:
    """Schätzt eine CPT.

    iss = 0 liefert relative Häufigkeiten, iss > 0 den Posterior-Erwartungswert
    unter einem Dirichlet-Prior mit iss/(r*q) je Zelle. Elternkonfigurationen
    ohne Beobachtung werden bei iss = 0 gleichverteilt gesetzt und markiert.
    """
    parents = tuple(parents)
    if iss < 0 or not np.isfinite(iss):
        raise ArgumentError("iss muss >= 0 sein")
    for v in (node,) + parents:
        if not d.meta(v).is_discrete:
            raise ArgumentError(f"Variable '{v}' ist stetig, CPT nicht möglich")
    ct = contingency_table(d, [node], parents)
    r = len(ct.levels[0])
    counts = np.moveaxis(ct.counts, 0, -1).reshape(-1, r).astype(np.float64)
    q = counts.shape[0]
    row_totals = counts.sum(axis=1)
    uniform_rows = ()
    if iss > 0:
        alpha = iss / (r * q)
        table = (counts + alpha) / (row_totals + r * alpha)[:, None]
    else:
        empty = row_totals == 0
        table = np.empty_like(counts)
        table[~empty] = counts[~empty] / row_totals[~empty, None]
        table[empty] = 1.0 / r
        uniform_rows = tuple(int(i) for i in np.flatnonzero(empty))
        if uniform_rows:
            logger.warning(f"{len(uniform_rows)} unbeobachtete Elternkonfiguration(en), Zeilen gleichverteilt",
                           LogCategory.PARAMS, node)
    return Cpt(node, parents, ct.levels[0], tuple(ct.levels[1:]), table, uniform_rows)


def fit_gaussian_local(d: Dataset, node: str, parents: Sequence[str] = ()) -> GaussianLocal:
    """Kleinste-Quadrate-Regression; Residualvarianz = RSS / (n - k - 1)"""
    parents = tuple(parents)
    for v in (node,) + parents:
        if d.meta(v).is_discrete:
            raise ArgumentError(f"Variable '{v}' ist diskret, Gauß-Regression nicht möglich")
    n, k = d.n, len(parents)
    if n <= k + 1:
        raise ArgumentError(f"'{node}': n={n} zu klein für {k} Elternknoten")
    y = d.column(node)
    design = np.column_stack([np.ones(n)] + [d.column(p) for p in parents])
    if np.linalg.matrix_rank(design) < k + 1:
        raise CollinearityError(f"Singuläre Designmatrix für '{node}' mit Eltern {list(parents)}")
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ beta
    rss = float(resid @ resid)
    tss = float(((y - y.mean()) ** 2).sum())
    if tss == 0.0 or rss <= 1e-10 * tss:
        raise DegenerateVarianceError(f"Residualvarianz von '{node}' ist null", variable=node)
    return GaussianLocal(node, parents, float(beta[0]), tuple(float(b) for b in beta[1:]), rss / (n - k - 1))


def fit_network(d: Dataset, g: Dag, iss: float = DEFAULT_ISS) -> BayesianNetwork:
    """Schätzt alle lokalen Verteilungen entlang der Eltern in g"""
    metas = [d.meta(node) for node in g.nodes]
    kinds = {m.is_discrete for m in metas}
    if len(kinds) > 1:
        raise ArgumentError("Variablen des Netzes müssen alle diskret oder alle stetig sein")
    all_discrete = kinds != {False}

    def fit(node):
        parents = tuple(sorted(g.parents(node)))
        if all_discrete:
            return fit_cpt(d, node, parents, iss)
        return fit_gaussian_local(d, node, parents)

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        fitted = list(pool.map(fit, g.nodes))
    bn = BayesianNetwork(g, dict(zip(g.nodes, fitted)))
    logger.debug(f"{bn!r} geschätzt", LogCategory.PARAMS)
    return bn


# =========== Auswertung ===========

def joint_probability(bn: BayesianNetwork, assignment: Mapping[str, Level]) -> float:
    """Produkt der lokalen bedingten Wahrscheinlichkeiten in topologischer Reihenfolge"""
    if not bn.is_discrete:
        raise ArgumentError("joint_probability benötigt ein diskretes Netz")
    missing = [n for n in bn.nodes if n not in assignment]
    if missing:
        raise ArgumentError(f"Zuordnung unvollständig, es fehlen {missing}")
    result = 1.0
    for node in bn.order:
        result *= bn.locals[node].probability(assignment[node], assignment)
    return result


@dataclass(frozen=True)
class LogLikelihood:
    """Log-Likelihood; zero_probability markiert eine Zeile mit Wahrscheinlichkeit null"""
    value: float
    zero_probability: bool = False

    def __float__(self) -> float:
        return self.value


def _check_compatible(bn: BayesianNetwork, d: Dataset) -> None:
    for node in bn.nodes:
        meta = d.meta(node)
        if bn.is_discrete:
            if not meta.is_discrete or meta.levels != bn.locals[node].levels:
                raise ArgumentError(f"Stufen von '{node}' passen nicht zum Netz")
        elif meta.is_discrete:
            raise ArgumentError(f"Variable '{node}' ist diskret, Netz ist gaußsch")


def row_log_likelihoods(bn: BayesianNetwork, d: Dataset) -> np.ndarray:
    """Log-Wahrscheinlichkeit bzw. -Dichte je Zeile (-inf bei Wahrscheinlichkeit null)"""
    _check_compatible(bn, d)
    total = np.zeros(d.n)
    with np.errstate(divide="ignore"):
        for node in bn.order:
            local = bn.locals[node]
            if isinstance(local, Cpt):
                if local.parents:
                    rows = np.ravel_multi_index([d.column(p) for p in local.parents], local.cards)
                else:
                    rows = np.zeros(d.n, dtype=np.int64)
                total += np.log(local.table[rows, d.column(node)])
            else:
                total += local.log_density(d.column(node), {p: d.column(p) for p in local.parents})
    return total


def log_likelihood(bn: BayesianNetwork, d: Dataset) -> LogLikelihood:
    """Summe der natürlichen Log-Wahrscheinlichkeiten über alle Zeilen"""
    per_row = row_log_likelihoods(bn, d)
    if np.any(np.isneginf(per_row)):
        return LogLikelihood(float("-inf"), True)
    # fsum ist exakt gerundet und damit unabhängig von der Zeilenreihenfolge
    return LogLikelihood(math.fsum(per_row.tolist()))


# =========== Zerlegbare Modelle ===========

@dataclass(frozen=True)
class MarginalTable:
    variables: Tuple[str, ...]
    table: np.ndarray


@dataclass(frozen=True)
class CliqueFactorization:
    """Cliquen- und Separator-Randverteilungen eines chordalen Graphen"""
    cliques: Tuple[MarginalTable, ...]
    separators: Tuple[MarginalTable, ...]
    levels: Mapping[str, Tuple[str, ...]] = field(default_factory=dict)

    def _lookup(self, marginal: MarginalTable, assignment: Mapping[str, Level]) -> float:
        idx = tuple(level_index(v, v, self.levels[v], assignment[v]) for v in marginal.variables)
        return float(marginal.table[idx])

    def joint(self, assignment: Mapping[str, Level]) -> float:
        """P(x) = prod P(C_i) / prod P(S_i)"""
        missing = [v for v in self.levels if v not in assignment]
        if missing:
            raise ArgumentError(f"Zuordnung unvollständig, es fehlen {missing}")
        numerator = 1.0
        for c in self.cliques:
            numerator *= self._lookup(c, assignment)
        if numerator == 0.0:
            return 0.0
        denominator = 1.0
        for s in self.separators:
            denominator *= self._lookup(s, assignment)
        return numerator / denominator


def clique_factorization(d: Dataset, g: MixedGraph) -> CliqueFactorization:
    """Relative Häufigkeiten der Cliquen und Separatoren (Reihenfolge mit Running Intersection)"""
    if g.arcs:
        raise ArgumentError("clique_factorization erwartet einen ungerichteten Graphen")
    chordal, _ = is_chordal(g)
    if not chordal:
        raise DecomposabilityError("Graph ist nicht chordal, Potentiale hätten keine Interpretation als Randverteilungen")
    for node in g.nodes:
        if not d.meta(node).is_discrete:
            raise ArgumentError(f"Variable '{node}' ist stetig")

    def marginal(names):
        names = tuple(sorted(names))
        ct = contingency_table(d, names)
        return MarginalTable(names, ct.counts / d.n)

    clique_list = cliques(g)
    tables = tuple(marginal(c) for c in clique_list)
    seps = tuple(marginal(s) for s in separators(clique_list) if s)
    return CliqueFactorization(tables, seps, {v: d.meta(v).levels for v in g.nodes})
