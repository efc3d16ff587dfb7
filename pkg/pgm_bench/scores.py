# pgm_bench/scores.py
# Version: 1.1.0

import math
import threading
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Tuple, Union

import numpy as np
from scipy.special import gammaln

from .const import DEFAULT_ISS, ScoreKind
from .data import Dataset, contingency_table
from .debug_mixin import DebugMixin
from .exceptions import ArgumentError, CollinearityError, DegenerateVarianceError, StructuralError
from .graph import Dag
from .logging_config import logger, LogCategory


@dataclass(frozen=True)
class ScoreValue:
    """Gesamtscore und Zerlegung nach Knoten (größer ist besser)"""
    total: float
    per_node: Mapping[str, float]


@dataclass(frozen=True, order=True)
class EdgeChange:
    """Elementare Änderung: 'add', 'remove' oder 'reverse' der Kante tail -> head"""
    op: str
    tail: str
    head: str

    def __post_init__(self):
        if self.op not in ("add", "remove", "reverse"):
            raise ArgumentError(f"Unbekannte Kantenänderung '{self.op}'")
        if self.tail == self.head:
            raise ArgumentError("Schleifen sind nicht erlaubt")

    def apply(self, g: Dag) -> Dag:
        """Wendet die Änderung an; ein entstehender Zyklus löst StructuralError aus"""
        if self.op == "add":
            if g.is_adjacent(self.tail, self.head):
                raise ArgumentError(f"{self.tail} und {self.head} sind bereits adjazent")
            return g.add_edge(self.tail, self.head)
        if self.op == "remove":
            if not g.has_arc(self.tail, self.head):
                raise ArgumentError(f"Keine Kante {self.tail} -> {self.head}")
            return g.remove_edge(self.tail, self.head)
        return g.reverse_arc(self.tail, self.head)

    def __str__(self) -> str:
        return f"{self.op}({self.tail} -> {self.head})"


def _as_score_kind(kind: Union[str, ScoreKind]) -> ScoreKind:
    try:
        kind = ScoreKind(kind)
    except ValueError:
        raise ArgumentError(f"Unbekannter Score '{kind}'")
    if kind == ScoreKind.MDL:
        logger.warning("MDL wird als BIC berechnet", LogCategory.SCORE)
        return ScoreKind.BIC
    return kind


class NetworkScorer(DebugMixin):
    """Lokale Scores mit Cache, Schlüssel (Knoten, Elternmenge).

    Der Cache ist durch ein Lock geschützt und kann von parallelen Suchen
    gemeinsam genutzt werden.
    """

    def __init__(self, d: Dataset, kind: Union[str, ScoreKind] = ScoreKind.BIC, iss: float = DEFAULT_ISS,
                 config: Optional[Dict] = None):
        self._init_debug_config(config)
        self.d = d
        self.kind = _as_score_kind(kind)
        self.iss = float(iss)
        if not (d.all_discrete or d.all_continuous):
            raise ArgumentError("Scores benötigen ausschließlich diskrete oder ausschließlich stetige Variablen")
        self.discrete = d.all_discrete
        if self.kind == ScoreKind.BDEU:
            if not self.discrete:
                raise ArgumentError("BDeu ist nur für diskrete Daten definiert")
            if not self.iss > 0:
                raise ArgumentError("BDeu benötigt iss > 0")
        self._cache: Dict[Tuple[str, FrozenSet[str]], float] = {}
        self._lock = threading.Lock()

    @property
    def cache_size(self) -> int:
        return len(self._cache)

    def local(self, node: str, parents: Iterable[str]) -> float:
        key = (node, frozenset(parents))
        with self._lock:
            value = self._cache.get(key)
        if value is None:
            value = self._compute(node, tuple(sorted(key[1])))
            with self._lock:
                self._cache[key] = value
        return value

    def _compute(self, node: str, parents: Tuple[str, ...]) -> float:
        if self.discrete:
            value = self._discrete(node, parents)
        else:
            value = self._gaussian(node, parents)
        self.debug_score(f"{self.kind.value}({node} | {','.join(parents) or '-'}) = {value:.6f}", node)
        return value

    def _penalised(self, loglik: float, k: int) -> float:
        if self.kind == ScoreKind.AIC:
            return loglik - k
        if self.kind == ScoreKind.BIC:
            return loglik - 0.5 * k * math.log(self.d.n)
        return loglik

    def _discrete(self, node: str, parents: Tuple[str, ...]) -> float:
        ct = contingency_table(self.d, [node], parents)
        r = len(ct.levels[0])
        counts = np.moveaxis(ct.counts, 0, -1).reshape(-1, r).astype(np.float64)
        q = counts.shape[0]
        row_totals = counts.sum(axis=1)
        if self.kind == ScoreKind.BDEU:
            a_jk = self.iss / (r * q)
            a_j = self.iss / q
            return float(np.sum(gammaln(a_j) - gammaln(a_j + row_totals))
                         + np.sum(gammaln(a_jk + counts) - gammaln(a_jk)))
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(counts > 0, counts * np.log(counts / row_totals[:, None]), 0.0)
        return self._penalised(float(terms.sum()), (r - 1) * q)

    def _gaussian(self, node: str, parents: Tuple[str, ...]) -> float:
        n = self.d.n
        y = self.d.column(node)
        design = np.column_stack([np.ones(n)] + [self.d.column(p) for p in parents])
        if np.linalg.matrix_rank(design) < design.shape[1]:
            raise CollinearityError(f"Singuläre Designmatrix für '{node}' mit Eltern {list(parents)}")
        beta, *_ = np.linalg.lstsq(design, y, rcond=None)
        resid = y - design @ beta
        variance = float(resid @ resid) / n
        if not variance > 0.0:
            raise DegenerateVarianceError(f"Residualvarianz von '{node}' ist null", variable=node)
        loglik = -0.5 * n * (math.log(2.0 * math.pi * variance) + 1.0)
        return self._penalised(loglik, len(parents) + 2)

    def score(self, g: Dag) -> ScoreValue:
        for node in g.nodes:
            self.d.meta(node)
        per_node = {node: self.local(node, g.parents(node)) for node in g.nodes}
        return ScoreValue(math.fsum(per_node.values()), per_node)

    def delta(self, g: Dag, change: EdgeChange) -> float:
        """score(geändert) - score(g); nur die betroffenen Knoten werden neu bewertet"""
        changed = change.apply(g)
        affected = (change.head,) if change.op != "reverse" else (change.tail, change.head)
        return math.fsum(self.local(v, changed.parents(v)) - self.local(v, g.parents(v)) for v in affected)


def score(d: Dataset, g: Dag, kind: Union[str, ScoreKind] = ScoreKind.BIC, iss: float = DEFAULT_ISS) -> ScoreValue:
    """Zerlegbarer Netzwerk-Score: loglik, aic, bic oder bdeu"""
    return NetworkScorer(d, kind, iss).score(g)


def score_delta(d: Dataset, g: Dag, change: EdgeChange, kind: Union[str, ScoreKind] = ScoreKind.BIC,
                iss: float = DEFAULT_ISS, cache: Optional[NetworkScorer] = None) -> float:
    """Score-Differenz einer Kantenänderung; cache ist ein wiederverwendbarer NetworkScorer"""
    scorer = cache if cache is not None else NetworkScorer(d, kind, iss)
    if scorer.d is not d:
        raise ArgumentError("Der übergebene Score-Cache gehört zu einem anderen Datensatz")
    try:
        return scorer.delta(g, change)
    except StructuralError as e:
        raise StructuralError(f"{change} erzeugt einen Zyklus", e.cycle)
