# pgm_bench/infer.py
# Version: 1.3.0

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .const import DEFAULT_SAMPLE_CHUNK, ROW_SUM_TOL, InferenceMethod, worker_count
from .data import Dataset
from .debug_mixin import DebugMixin
from .exceptions import ArgumentError, InconsistentEvidenceError, InsufficientAcceptanceError
from .factor import Factor
from .logging_config import logger, LogCategory
from .params import BayesianNetwork, Cpt, GaussianLocal, Level, level_index


@dataclass(frozen=True)
class Evidence:
    """Harte Evidenz (Knoten -> Stufe) und weiche Evidenz (Knoten -> Ersatzverteilung)"""
    hard: Mapping[str, Level] = field(default_factory=dict)
    soft: Mapping[str, Sequence] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "hard", dict(self.hard))
        object.__setattr__(self, "soft", {k: np.asarray(v, dtype=np.float64) for k, v in self.soft.items()})
        overlap = set(self.hard) & set(self.soft)
        if overlap:
            raise ArgumentError(f"Knoten mit harter und weicher Evidenz: {sorted(overlap)}")
        for node, vec in self.soft.items():
            if np.any(vec < 0) or np.any(np.abs(vec.sum(axis=-1) - 1.0) > ROW_SUM_TOL):
                raise ArgumentError(f"Weiche Evidenz für '{node}' ist nicht normiert")

    @property
    def empty(self) -> bool:
        return not self.hard and not self.soft


@dataclass(frozen=True)
class QueryResult:
    """Gemeinsame (bedingte) Verteilung der Anfrageknoten"""
    query: Tuple[str, ...]
    levels: Tuple[Tuple[str, ...], ...]
    table: np.ndarray
    method: str
    samples: Optional[int] = None
    accepted: Optional[int] = None
    effective_weight: Optional[float] = None

    def marginal(self, node: str) -> np.ndarray:
        axis = self.query.index(node)
        other = tuple(i for i in range(len(self.query)) if i != axis)
        return self.table.sum(axis=other) if other else self.table

    def probability(self, assignment: Mapping[str, Level]) -> float:
        idx = tuple(level_index(q, q, lv, assignment[q]) for q, lv in zip(self.query, self.levels))
        return float(self.table[idx])


def _check_query(bn: BayesianNetwork, query: Union[str, Sequence[str]]) -> Tuple[str, ...]:
    if not bn.is_discrete:
        raise ArgumentError("Inferenz ist nur für diskrete Netze implementiert")
    query = (query,) if isinstance(query, str) else tuple(query)
    if not query:
        raise ArgumentError("Die Anfrage braucht mindestens einen Knoten")
    if len(set(query)) != len(query):
        raise ArgumentError("Doppelte Anfrageknoten")
    for node in query:
        bn.local(node)
    return query


def _hard_indices(bn: BayesianNetwork, ev: Evidence) -> Dict[str, int]:
    return {node: level_index(node, node, bn.levels(node), value) for node, value in ev.hard.items()}


def apply_soft_evidence(bn: BayesianNetwork, soft: Mapping[str, Sequence]) -> BayesianNetwork:
    """Ersetzt lokale Verteilungen; Struktur bleibt unverändert.

    Für Knoten ohne Eltern genügt ein Vektor, sonst wird eine Zeile je
    Elternkonfiguration erwartet.
    """
    if not soft:
        return bn
    locals_ = dict(bn.locals)
    for node, replacement in soft.items():
        cpt = bn.local(node)
        if not isinstance(cpt, Cpt):
            raise ArgumentError(f"Knoten '{node}' ist stetig")
        table = np.asarray(replacement, dtype=np.float64)
        if table.ndim == 1:
            if cpt.parents:
                raise ArgumentError(f"'{node}' hat Eltern, Ersatz je Elternkonfiguration nötig")
            table = table[None, :]
        elif cpt.parents:
            logger.info(f"Weiche Evidenz je Elternkonfiguration für '{node}' (Ersatz der CPT)", LogCategory.INFER)
        if table.shape != cpt.table.shape:
            raise ArgumentError(f"Ersatz für '{node}' hat Form {table.shape}, erwartet {cpt.table.shape}")
        locals_[node] = Cpt(node, cpt.parents, cpt.levels, cpt.parent_levels, table)
    return BayesianNetwork(bn.dag, locals_)


# =========== Variablenelimination ===========

class _Trace(DebugMixin):
    """Debug-Ausgaben der Inferenz (Schalter debugging.infer)"""

    def __init__(self):
        self._init_debug_config()



def _min_degree_order(scopes: List[Tuple[str, ...]], hidden: Sequence[str]) -> List[str]:
    """Greedy Min-Degree auf dem Interaktionsgraphen, Gleichstand nach Name"""
    adjacency: Dict[str, set] = {v: set() for v in hidden}
    for scope in scopes:
        for v in scope:
            adjacency.setdefault(v, set()).update(u for u in scope if u != v)
    remaining = set(hidden)
    order = []
    while remaining:
        v = min(remaining, key=lambda u: (len(adjacency[u]), u))
        order.append(v)
        remaining.discard(v)
        nbrs = adjacency.pop(v)
        for a in nbrs:
            adjacency[a].discard(v)
            adjacency[a].update(b for b in nbrs if b != a)
    return order


def variable_elimination(bn: BayesianNetwork, query: Union[str, Sequence[str]], ev: Optional[Evidence] = None,
                         order: Optional[Sequence[str]] = None) -> QueryResult:
    """Exakte Anfrage P(query | Evidenz)"""
    query = _check_query(bn, query)
    ev = ev or Evidence()
    bn = apply_soft_evidence(bn, ev.soft)
    hard = _hard_indices(bn, ev)

    # Knoten ohne Einfluss (keine Vorfahren von Anfrage oder Evidenz) summieren sich zu 1
    relevant = set(query) | set(hard)
    for node in list(relevant):
        relevant |= bn.dag.ancestors(node)

    factors: List[Factor] = []
    for node in bn.order:
        if node not in relevant:
            continue
        f = bn.local(node).as_factor()
        for var, idx in hard.items():
            if var not in query and var in f.variables:
                f = f.reduce(var, idx)
        factors.append(f)
    for var, idx in hard.items():
        if var in query:
            indicator = np.zeros(len(bn.levels(var)))
            indicator[idx] = 1.0
            factors.append(Factor((var,), (indicator.size,), indicator))

    hidden = sorted(v for v in relevant if v not in query and v not in hard)
    if order is None:
        order = _min_degree_order([f.variables for f in factors], hidden)
    else:
        order = [v for v in order if v in hidden]
        if set(order) != set(hidden):
            raise ArgumentError(f"Eliminationsreihenfolge muss {hidden} abdecken")
    _Trace().debug_infer(f"Eliminationsreihenfolge: {', '.join(order) or '-'}")

    for var in order:
        involved = [f for f in factors if var in f.variables]
        factors = [f for f in factors if var not in f.variables]
        product = Factor.unit()
        for f in involved:
            product = product.product(f)
        factors.append(product.sum_out(var))

    result = Factor.unit()
    for f in factors:
        result = result.product(f)
    result = result.transpose(query)
    z = result.total()
    if not z > 0.0:
        raise InconsistentEvidenceError("Evidenz hat Wahrscheinlichkeit null")
    levels = tuple(bn.levels(q) for q in query)
    return QueryResult(query, levels, result.values / z, InferenceMethod.VARIABLE_ELIMINATION.value)


# =========== Stichprobenverfahren ===========

def _chunks(n: int, chunk_size: int) -> List[int]:
    if n < 1:
        raise ArgumentError("Die Stichprobengröße muss >= 1 sein")
    if chunk_size < 1:
        raise ArgumentError("chunk_size muss >= 1 sein")
    full, rest = divmod(n, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def _forward(bn: BayesianNetwork, n: int, rng: np.random.Generator,
             clamped: Optional[Mapping[str, int]] = None) -> Tuple[Dict[str, np.ndarray], np.ndarray]:
    """Vorwärtsstichprobe in topologischer Reihenfolge; geklemmte Knoten liefern Gewichte"""
    clamped = clamped or {}
    values: Dict[str, np.ndarray] = {}
    weights = np.ones(n)
    for node in bn.order:
        local = bn.locals[node]
        if isinstance(local, GaussianLocal):
            mean = local.mean({p: values[p] for p in local.parents})
            values[node] = mean + np.sqrt(local.residual_variance) * rng.standard_normal(n)
            continue
        if local.parents:
            rows = np.ravel_multi_index([values[p] for p in local.parents], local.cards)
        else:
            rows = np.zeros(n, dtype=np.int64)
        probs = local.table[rows]
        if node in clamped:
            idx = clamped[node]
            values[node] = np.full(n, idx, dtype=np.int64)
            weights *= probs[:, idx]
        else:
            u = rng.random(n)
            codes = (u[:, None] >= np.cumsum(probs, axis=1)).sum(axis=1)
            values[node] = np.minimum(codes, probs.shape[1] - 1)
    return values, weights


def _run_chunks(func, samples: int, seed: int, chunk_size: int) -> list:
    sizes = _chunks(samples, chunk_size)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    _Trace().debug_infer(f"{samples} Stichproben in {len(sizes)} Blöcken")
    jobs = [(size, np.random.Generator(np.random.PCG64(stream))) for size, stream in zip(sizes, streams)]
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return list(pool.map(lambda job: func(*job), jobs))


def _config_index(values: Mapping[str, np.ndarray], query: Tuple[str, ...], cards: Tuple[int, ...]) -> np.ndarray:
    return np.ravel_multi_index([values[q] for q in query], cards)


def logic_sampling(bn: BayesianNetwork, query: Union[str, Sequence[str]], ev: Optional[Evidence] = None,
                   samples: int = 10000, seed: int = 0, chunk_size: int = DEFAULT_SAMPLE_CHUNK) -> QueryResult:
    """Vorwärtsstichproben, Verwerfen bei Widerspruch zur harten Evidenz.

    Zufallszahlen: numpy PCG64, je Block ein aus seed abgeleiteter Strom.
    """
    query = _check_query(bn, query)
    ev = ev or Evidence()
    bn = apply_soft_evidence(bn, ev.soft)
    hard = _hard_indices(bn, ev)
    cards = tuple(len(bn.levels(q)) for q in query)
    size = int(np.prod(cards))

    def chunk(n, rng):
        values, _ = _forward(bn, n, rng)
        keep = np.ones(n, dtype=bool)
        for node, idx in hard.items():
            keep &= values[node] == idx
        idx = _config_index(values, query, cards)[keep]
        return np.bincount(idx, minlength=size)

    counts = np.sum(_run_chunks(chunk, samples, seed, chunk_size), axis=0)
    accepted = int(counts.sum())
    if accepted == 0:
        raise InsufficientAcceptanceError(f"Keine der {samples} Stichproben passt zur Evidenz; "
                                          "Stichprobengröße erhöhen oder Likelihood Weighting verwenden")
    logger.debug(f"Logic Sampling: {accepted} von {samples} akzeptiert", LogCategory.INFER)
    table = (counts / accepted).reshape(cards)
    return QueryResult(query, tuple(bn.levels(q) for q in query), table, InferenceMethod.LOGIC_SAMPLING.value,
                       samples, accepted)


def likelihood_weighting(bn: BayesianNetwork, query: Union[str, Sequence[str]], ev: Optional[Evidence] = None,
                         samples: int = 10000, seed: int = 0,
                         chunk_size: int = DEFAULT_SAMPLE_CHUNK) -> QueryResult:
    """Evidenzknoten werden geklemmt, Gewicht = Produkt der Evidenz-Likelihoods"""
    query = _check_query(bn, query)
    ev = ev or Evidence()
    bn = apply_soft_evidence(bn, ev.soft)
    hard = _hard_indices(bn, ev)
    cards = tuple(len(bn.levels(q)) for q in query)
    size = int(np.prod(cards))

    def chunk(n, rng):
        values, weights = _forward(bn, n, rng, hard)
        mass = np.bincount(_config_index(values, query, cards), weights=weights, minlength=size)
        return mass, float(weights @ weights)

    parts = _run_chunks(chunk, samples, seed, chunk_size)
    mass = np.sum([m for m, _ in parts], axis=0)
    total = float(mass.sum())
    if not total > 0.0:
        raise InconsistentEvidenceError("Alle Gewichte sind null, Evidenz hat Wahrscheinlichkeit null")
    squares = sum(s for _, s in parts)
    ess = total * total / squares
    logger.debug(f"Likelihood Weighting: effektive Stichprobengröße {ess:.1f}", LogCategory.INFER)
    return QueryResult(query, tuple(bn.levels(q) for q in query), (mass / total).reshape(cards),
                       InferenceMethod.LIKELIHOOD_WEIGHTING.value, samples, None, ess)


def query(bn: BayesianNetwork, nodes: Union[str, Sequence[str]], ev: Optional[Evidence] = None,
          method: Union[str, InferenceMethod] = InferenceMethod.VARIABLE_ELIMINATION,
          samples: int = 10000, seed: int = 0, chunk_size: int = DEFAULT_SAMPLE_CHUNK) -> QueryResult:
    """Beantwortet eine Anfrage mit dem gewählten Verfahren"""
    try:
        method = InferenceMethod(method)
    except ValueError:
        raise ArgumentError(f"Unbekanntes Inferenzverfahren '{method}'")
    if method == InferenceMethod.VARIABLE_ELIMINATION:
        return variable_elimination(bn, nodes, ev)
    if method == InferenceMethod.LOGIC_SAMPLING:
        return logic_sampling(bn, nodes, ev, samples, seed, chunk_size)
    return likelihood_weighting(bn, nodes, ev, samples, seed, chunk_size)


def sample_dataset(bn: BayesianNetwork, n: int, seed: int = 0, chunk_size: int = DEFAULT_SAMPLE_CHUNK) -> Dataset:
    """Simuliert n Beobachtungen aus dem Netz (diskret oder gaußsch)"""
    parts = _run_chunks(lambda size, rng: _forward(bn, size, rng)[0], n, seed, chunk_size)
    columns = {node: np.concatenate([p[node] for p in parts]) for node in bn.nodes}
    return Dataset(bn.variables(), columns)
