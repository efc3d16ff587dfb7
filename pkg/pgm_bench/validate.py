# pgm_bench/validate.py
# Version: 1.2.0

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, List, Optional, Tuple, Union

import numpy as np
import networkx as nx

from .const import DEFAULT_ISS, LossKind, worker_count
from .data import Dataset
from .debug_mixin import DebugMixin
from .exceptions import ArgumentError, BootstrapError, InconsistentEvidenceError, PgmError
from .graph import Dag, MixedGraph, Pdag, markov_blanket, pdag_to_dag
from .infer import Evidence, variable_elimination
from .learn import LearnConfig, learn_structure
from .logging_config import logger, LogCategory
from .params import BayesianNetwork, fit_network, row_log_likelihoods

Learner = Union[LearnConfig, Callable[[Dataset], MixedGraph]]
MIN_REPLICATES = 10
MAX_FAILURE_RATE = 0.2


def _as_learner(learner: Learner) -> Callable[[Dataset], MixedGraph]:
    if isinstance(learner, LearnConfig):
        return lambda data: learn_structure(data, learner)
    if callable(learner):
        return learner
    raise ArgumentError("learner muss eine LearnConfig oder eine Funktion Dataset -> Graph sein")


@dataclass(frozen=True)
class EdgeConfidence:
    """Bootstrap-Häufigkeiten gerichteter Kanten und des Gerüsts"""
    nodes: Tuple[str, ...]
    arcs: Dict[Tuple[str, str], float]
    skeleton: Dict[FrozenSet[str], float]
    replicates: int
    successful: int
    failures: int = 0

    def arc(self, tail: str, head: str) -> float:
        return self.arcs.get((tail, head), 0.0)

    def edge(self, a: str, b: str) -> float:
        return self.skeleton.get(frozenset((a, b)), 0.0)

    def rows(self) -> List[Tuple[str, str, float, float, float]]:
        """(from, to, Gerüst, vorwärts, rückwärts) für alle beobachteten Paare, sortiert"""
        result = []
        for pair in sorted(self.skeleton, key=sorted):
            a, b = sorted(pair)
            result.append((a, b, self.skeleton[pair], self.arc(a, b), self.arc(b, a)))
        return result


class _Bootstrap(DebugMixin):

    def __init__(self, d: Dataset, learner: Learner, replicates: int, seed: int,
                 max_failure_rate: float, config: Optional[Dict] = None):
        self._init_debug_config(config)
        if replicates < MIN_REPLICATES:
            raise ArgumentError(f"Mindestens {MIN_REPLICATES} Bootstrap-Replikate nötig, erhalten {replicates}")
        if not 0.0 <= max_failure_rate < 1.0:
            raise ArgumentError(f"max_failure_rate muss in [0, 1) liegen, erhalten {max_failure_rate}")
        self.d = d
        self.learn = _as_learner(learner)
        self.replicates = replicates
        self.seed = seed
        self.max_failure_rate = max_failure_rate

    def _replicate(self, index: int, stream: np.random.SeedSequence) -> Optional[MixedGraph]:
        rng = np.random.Generator(np.random.PCG64(stream))
        rows = rng.integers(0, self.d.n, size=self.d.n)
        try:
            g = self.learn(self.d.take(rows))
        except PgmError as e:
            logger.warning(f"Replikat {index} übersprungen: {e}", LogCategory.VALIDATE)
            return None
        self.debug_validate(f"{len(g.edges)} Kanten", index)
        return g

    def run(self) -> EdgeConfidence:
        streams = np.random.SeedSequence(self.seed).spawn(self.replicates)
        with ThreadPoolExecutor(max_workers=worker_count()) as pool:
            graphs = list(pool.map(self._replicate, range(self.replicates), streams))
        learned = [g for g in graphs if g is not None]
        failures = self.replicates - len(learned)
        if failures > self.max_failure_rate * self.replicates or not learned:
            raise BootstrapError(f"{failures} von {self.replicates} Replikaten fehlgeschlagen")
        arc_counts: Dict[Tuple[str, str], int] = {}
        pair_counts: Dict[FrozenSet[str], int] = {}
        for g in learned:
            for e in g.edges:
                pair_counts[e.pair] = pair_counts.get(e.pair, 0) + 1
                if e.directed:
                    arc_counts[(e.tail, e.head)] = arc_counts.get((e.tail, e.head), 0) + 1
        total = len(learned)
        logger.info(f"Bootstrap: {total} Replikate ausgewertet, {failures} fehlgeschlagen", LogCategory.VALIDATE)
        return EdgeConfidence(self.d.names,
                              {k: v / total for k, v in sorted(arc_counts.items())},
                              {k: v / total for k, v in sorted(pair_counts.items(), key=lambda kv: sorted(kv[0]))},
                              self.replicates, total, failures)


def bootstrap_confidence(d: Dataset, learner: Learner, replicates: int = 100, seed: int = 0,
                         max_failure_rate: float = MAX_FAILURE_RATE) -> EdgeConfidence:
    """Nichtparametrischer Bootstrap: Häufigkeit jeder Kante über R Replikate"""
    return _Bootstrap(d, learner, replicates, seed, max_failure_rate).run()


def averaged_network(conf: EdgeConfidence, threshold: float = 0.5) -> Pdag:
    """Gemitteltes Netz: Kanten mit Gerüst-Häufigkeit >= threshold, Richtung nach Mehrheit.

    Gleich häufige Richtungen und Kanten, die einen Zyklus schließen würden,
    bleiben ungerichtet.
    """
    if not 0.0 < threshold <= 1.0:
        raise ArgumentError("threshold muss in (0, 1] liegen")
    kept = [(a, b, s, fw, bw) for a, b, s, fw, bw in conf.rows() if s >= threshold]
    directed = sorted(((max(fw, bw), (a, b) if fw > bw else (b, a)) for a, b, s, fw, bw in kept if fw != bw),
                      key=lambda item: (-item[0], item[1]))
    arcs: List[Tuple[str, str]] = []
    graph = nx.DiGraph()
    graph.add_nodes_from(conf.nodes)
    for _, (tail, head) in directed:
        if nx.has_path(graph, head, tail):
            continue
        graph.add_edge(tail, head)
        arcs.append((tail, head))
    oriented = {frozenset(a) for a in arcs}
    undirected = [(a, b, "undirected") for a, b, *_ in kept if frozenset((a, b)) not in oriented]
    return Pdag(conf.nodes, sorted(arcs) + undirected)


# =========== Kreuzvalidierung ===========

@dataclass(frozen=True)
class CvResult:
    folds: int
    losses: Tuple[float, ...]
    mean: float
    loss: str
    target: Optional[str] = None
    sizes: Tuple[int, ...] = field(default=())


class _Predictor:
    """Vorhersage eines diskreten Ziels aus seiner Markov-Decke (mit Cache je Konfiguration)"""

    def __init__(self, bn: BayesianNetwork, target: str):
        self.bn = bn
        self.target = target
        self.blanket = tuple(sorted(markov_blanket(bn.dag, target)))
        self._cache: Dict[Tuple[int, ...], int] = {}
        self._prior: Optional[int] = None

    def _argmax(self, evidence: Dict[str, int]) -> int:
        result = variable_elimination(self.bn, self.target, Evidence(hard=evidence))
        return int(np.argmax(result.table))

    def predict(self, config: Tuple[int, ...]) -> int:
        if config not in self._cache:
            try:
                self._cache[config] = self._argmax(dict(zip(self.blanket, config)))
            except InconsistentEvidenceError:
                logger.warning(f"Konfiguration der Markov-Decke von '{self.target}' hat Wahrscheinlichkeit null, "
                               "Vorhersage aus der A-priori-Verteilung", LogCategory.VALIDATE)
                if self._prior is None:
                    self._prior = self._argmax({})
                self._cache[config] = self._prior
        return self._cache[config]


def _to_dag(g: MixedGraph) -> Dag:
    return g if isinstance(g, Dag) else pdag_to_dag(g)


def cross_validate(d: Dataset, learner: Learner, folds: int = 10, loss: Union[str, LossKind] = LossKind.MISCLASSIFICATION,
                   target: Optional[str] = None, seed: int = 0, iss: float = DEFAULT_ISS) -> CvResult:
    """K-fache Kreuzvalidierung: Struktur und Parameter auf den Trainingsdaten, Verlust auf dem Testteil"""
    try:
        loss = LossKind(loss)
    except ValueError:
        raise ArgumentError(f"Unbekannte Verlustfunktion '{loss}'")
    if not 2 <= folds <= d.n:
        raise ArgumentError(f"folds muss zwischen 2 und n={d.n} liegen")
    if loss != LossKind.LOGL:
        if target is None:
            raise ArgumentError(f"Verlust '{loss.value}' benötigt eine Zielvariable")
        meta = d.meta(target)
        if loss == LossKind.MISCLASSIFICATION and not meta.is_discrete:
            raise ArgumentError("Fehlklassifikation benötigt ein diskretes Ziel")
        if loss == LossKind.RSS and meta.is_discrete:
            raise ArgumentError("RSS benötigt ein stetiges Ziel")
    learn = _as_learner(learner)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    parts = np.array_split(rng.permutation(d.n), folds)

    def evaluate(index: int) -> float:
        test_rows = parts[index]
        train_rows = np.concatenate([p for i, p in enumerate(parts) if i != index])
        train, test = d.take(train_rows), d.take(test_rows)
        bn = fit_network(train, _to_dag(learn(train)), iss)
        if loss == LossKind.LOGL:
            per_row = row_log_likelihoods(bn, test)
            if np.any(np.isneginf(per_row)):
                logger.warning(f"Fold {index}: Testzeile mit Wahrscheinlichkeit null", LogCategory.VALIDATE)
                return math.inf
            return -math.fsum(per_row.tolist()) / test.n
        if loss == LossKind.RSS:
            local = bn.local(target)
            predicted = local.mean({p: test.column(p) for p in local.parents})
            return float(np.sum((test.column(target) - predicted) ** 2))
        predictor = _Predictor(bn, target)
        observed = test.column(target)
        configs = zip(*(test.column(v) for v in predictor.blanket)) if predictor.blanket else [()] * test.n
        predicted = np.array([predictor.predict(tuple(int(c) for c in cfg)) for cfg in configs])
        return float(np.mean(predicted != observed))

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        losses = tuple(pool.map(evaluate, range(folds)))
    mean = math.fsum(losses) / folds
    logger.info(f"Kreuzvalidierung ({loss.value}, K={folds}): mittlerer Verlust {mean:.6g}", LogCategory.VALIDATE)
    return CvResult(folds, losses, mean, loss.value, target, tuple(len(p) for p in parts))
