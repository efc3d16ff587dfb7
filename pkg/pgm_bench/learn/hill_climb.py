# pgm_bench/learn/hill_climb.py
# Version: 1.3.0

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import numpy as np

from ..const import SCORE_EPS, worker_count
from ..data import Dataset
from ..debug_mixin import DebugMixin
from ..exceptions import ArgumentError
from ..graph import Dag
from ..logging_config import logger, LogCategory
from ..scores import EdgeChange, NetworkScorer
from .config import LearnConfig

Pair = FrozenSet[str]


class _State:
    """Veränderliche Elternmengen während der Suche"""

    def __init__(self, nodes: Iterable[str], arcs: Iterable[Tuple[str, str]] = ()):
        self.nodes = tuple(nodes)
        self.parents: Dict[str, Set[str]] = {v: set() for v in self.nodes}
        for a, b in arcs:
            self.parents[b].add(a)

    def copy(self) -> '_State':
        return _State(self.nodes, self.arcs())

    def arcs(self) -> List[Tuple[str, str]]:
        return sorted((p, v) for v in self.nodes for p in self.parents[v])

    def has_arc(self, a: str, b: str) -> bool:
        return a in self.parents[b]

    def adjacent(self, a: str, b: str) -> bool:
        return a in self.parents[b] or b in self.parents[a]

    def reaches(self, source: str, target: str, skip: Optional[Tuple[str, str]] = None) -> bool:
        """Gerichteter Pfad source -> ... -> target (rückwärts über Eltern gesucht)"""
        seen = {target}
        stack = [target]
        while stack:
            v = stack.pop()
            for p in self.parents[v]:
                if skip is not None and (p, v) == skip:
                    continue
                if p == source:
                    return True
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return False

    def apply(self, move: EdgeChange) -> None:
        if move.op == "add":
            self.parents[move.head].add(move.tail)
        elif move.op == "remove":
            self.parents[move.head].discard(move.tail)
        else:
            self.parents[move.head].discard(move.tail)
            self.parents[move.tail].add(move.head)

    def to_dag(self) -> Dag:
        return Dag(self.nodes, self.arcs())

    def encoding(self) -> Tuple[Tuple[str, str], ...]:
        return tuple(self.arcs())


def _inverse(move: EdgeChange) -> EdgeChange:
    if move.op == "add":
        return EdgeChange("remove", move.tail, move.head)
    if move.op == "remove":
        return EdgeChange("add", move.tail, move.head)
    return EdgeChange("reverse", move.head, move.tail)


class HillClimber(DebugMixin):
    """Greedy-Suche über Hinzufügen, Entfernen und Umkehren einzelner Kanten.

    Steckt die Suche fest, werden bis zu tabu_length nicht verbessernde Schritte
    gegangen; Umkehrungen kürzlich ausgeführter Schritte sind dabei tabu.
    Ergebnis ist der beste besuchte Graph.
    """

    def __init__(self, d: Dataset, cfg: LearnConfig, allowed: Optional[Iterable[Iterable[str]]] = None,
                 scorer: Optional[NetworkScorer] = None, config: Optional[Dict] = None):
        self._init_debug_config(config)
        self.d = d
        self.cfg = cfg
        self.nodes = d.names
        self.allowed: Optional[Set[Pair]] = None if allowed is None else {frozenset(p) for p in allowed}
        self.scorer = scorer or NetworkScorer(d, cfg.score, cfg.iss, config)

    def _permitted(self, a: str, b: str) -> bool:
        return self.allowed is None or frozenset((a, b)) in self.allowed

    def _delta(self, state: _State, move: EdgeChange) -> float:
        local = self.scorer.local
        head_parents = state.parents[move.head]
        if move.op == "add":
            return local(move.head, head_parents | {move.tail}) - local(move.head, head_parents)
        if move.op == "remove":
            return local(move.head, head_parents - {move.tail}) - local(move.head, head_parents)
        tail_parents = state.parents[move.tail]
        return (local(move.head, head_parents - {move.tail}) - local(move.head, head_parents)
                + local(move.tail, tail_parents | {move.head}) - local(move.tail, tail_parents))

    def moves(self, state: _State) -> List[EdgeChange]:
        """Alle zulässigen Einzeländerungen, die den Graphen azyklisch lassen"""
        result = []
        max_parents = self.cfg.max_parents
        for a in self.nodes:
            for b in self.nodes:
                if a == b:
                    continue
                if state.has_arc(a, b):
                    result.append(EdgeChange("remove", a, b))
                    if (self._permitted(b, a) and len(state.parents[a]) < max_parents
                            and not state.reaches(a, b, skip=(a, b))):
                        result.append(EdgeChange("reverse", a, b))
                elif (not state.adjacent(a, b) and self._permitted(a, b)
                      and len(state.parents[b]) < max_parents and not state.reaches(b, a)):
                    result.append(EdgeChange("add", a, b))
        return result

    def _ranked(self, state: _State) -> List[Tuple[float, EdgeChange]]:
        # größtes Delta zuerst, bei Gleichstand der lexikographisch kleinste Schritt
        scored = [(self._delta(state, m), m) for m in self.moves(state)]
        return sorted(scored, key=lambda item: (-item[0], item[1]))

    def total(self, state: _State) -> float:
        return sum(self.scorer.local(v, state.parents[v]) for v in self.nodes)

    def climb(self, start: _State) -> Tuple[float, _State]:
        state = start.copy()
        current = self.total(state)
        best_score, best_state = current, state.copy()
        tabu: deque = deque(maxlen=self.cfg.tabu_length or None)
        escape_left = self.cfg.tabu_length
        while True:
            ranked = self._ranked(state)
            if not ranked:
                break
            choice = None
            # ein tabuisierter Schritt ist erlaubt, wenn er einen neuen Bestwert liefert
            if current + ranked[0][0] > best_score + SCORE_EPS:
                choice = ranked[0]
            else:
                allowed = [item for item in ranked if item[1] not in tabu]
                if allowed and allowed[0][0] > SCORE_EPS:
                    choice = allowed[0]
                elif allowed and escape_left > 0:
                    choice = allowed[0]
                    escape_left -= 1
            if choice is None:
                break
            delta, move = choice
            state.apply(move)
            current += delta
            if self.cfg.tabu_length:
                tabu.append(_inverse(move))
            self.debug_learn(f"{move}: delta={delta:.6f}, score={current:.6f}")
            if current > best_score + SCORE_EPS:
                best_score, best_state = current, state.copy()
                escape_left = self.cfg.tabu_length
        return self.total(best_state), best_state

    def perturb(self, state: _State, rng: np.random.Generator) -> _State:
        perturbed = state.copy()
        for _ in range(self.cfg.perturb):
            candidates = self.moves(perturbed)
            if not candidates:
                break
            perturbed.apply(candidates[int(rng.integers(len(candidates)))])
        return perturbed

    def search(self, start: Optional[Dag] = None) -> Dag:
        if start is not None:
            if set(start.nodes) != set(self.nodes):
                raise ArgumentError("Startgraph muss dieselben Knoten wie der Datensatz haben")
            initial = _State(self.nodes, start.arcs)
        else:
            initial = _State(self.nodes)
        best_score, best = self.climb(initial)
        logger.debug(f"Hill Climbing: Score {best_score:.6f} ohne Neustart", LogCategory.LEARN)

        if self.cfg.restarts:
            streams = np.random.SeedSequence(self.cfg.seed).spawn(self.cfg.restarts)
            base = best

            def restart(stream):
                rng = np.random.Generator(np.random.PCG64(stream))
                return self.climb(self.perturb(base, rng))

            with ThreadPoolExecutor(max_workers=worker_count()) as pool:
                results = list(pool.map(restart, streams))
            for i, (value, state) in enumerate(results, start=1):
                self.debug_learn(f"Neustart {i}: Score {value:.6f}")
            # bester Score, bei Gleichstand die kleinste Kodierung
            candidates = [(best_score, best)] + results
            top = max(value for value, _ in candidates)
            best_score, best = min(((v, s) for v, s in candidates if v >= top - SCORE_EPS),
                                   key=lambda item: item[1].encoding())
        logger.info(f"Hill Climbing: {len(best.arcs())} Kanten, Score {best_score:.6f}", LogCategory.LEARN)
        return best.to_dag()


def hill_climb(d: Dataset, cfg: Optional[LearnConfig] = None, allowed: Optional[Iterable[Iterable[str]]] = None,
               start: Optional[Dag] = None) -> Dag:
    """Score-basiertes Lernen per Hill Climbing mit Tabu-Liste und Neustarts"""
    cfg = cfg or LearnConfig()
    return HillClimber(d, cfg, allowed).search(start)
