# pgm_bench/learn/grow_shrink.py
# Version: 1.3.0

from concurrent.futures import ThreadPoolExecutor
from itertools import chain, combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Protocol, Sequence, Set, Tuple

import networkx as nx

from ..citests import CITester
from ..const import worker_count
from ..data import Dataset
from ..debug_mixin import DebugMixin
from ..exceptions import ArgumentError, PgmError
from ..graph import Pdag, UGraph, apply_orientation_rules
from ..logging_config import logger, LogCategory
from .config import LearnConfig


class IndependenceTester(Protocol):
    """Schnittstelle, die die Lerner von einem Test erwarten"""

    @property
    def variables(self) -> Sequence[str]: ...

    def pvalue(self, x: str, y: str, given: Iterable[str] = ()) -> float: ...


def _tester(d: Optional[Dataset], cfg: LearnConfig, tester: Optional[IndependenceTester]) -> IndependenceTester:
    if tester is not None:
        return tester
    return CITester(d, cfg.test_for(d))


def _subsets(candidates: Sequence[str], max_size: int):
    """Alle Teilmengen nach Größe, innerhalb einer Größe lexikographisch"""
    ordered = sorted(candidates)
    return chain.from_iterable(combinations(ordered, k) for k in range(min(max_size, len(ordered)) + 1))


class GrowShrink(DebugMixin):
    """Grow-Shrink: Markov-Decken per Tests, daraus Nachbarn und v-Strukturen"""

    def __init__(self, tester: IndependenceTester, cfg: LearnConfig, config: Optional[Dict] = None):
        self._init_debug_config(config)
        self.tester = tester
        self.cfg = cfg
        self.variables = tuple(sorted(tester.variables))

    def _dependent(self, x: str, y: str, given: Iterable[str]) -> bool:
        given = tuple(given)
        try:
            return self.tester.pvalue(x, y, given) <= self.cfg.alpha
        except PgmError as e:
            # Typ und Attribute bleiben erhalten, nur die Meldung bekommt den Test vorangestellt
            cond = ",".join(sorted(given)) if given else "-"
            e.args = (f"Test {x} _||_ {y} | {cond}: {e}",) + e.args[1:]
            raise

    def blanket(self, x: str) -> FrozenSet[str]:
        if x not in self.variables:
            raise ArgumentError(f"Unbekannte Variable '{x}'")
        blanket: List[str] = []
        # Wachsen: Durchläufe in Namensreihenfolge, bis nichts mehr hinzukommt
        grown = True
        while grown:
            grown = False
            for y in self.variables:
                if y == x or y in blanket:
                    continue
                if self._dependent(x, y, blanket):
                    blanket.append(y)
                    grown = True
        # Schrumpfen
        shrunk = True
        while shrunk:
            shrunk = False
            for y in sorted(blanket):
                rest = [z for z in blanket if z != y]
                if not self._dependent(x, y, rest):
                    blanket.remove(y)
                    shrunk = True
        self.debug_learn(f"Markov-Decke: {sorted(blanket)}", x)
        return frozenset(blanket)

    def blankets(self) -> Dict[str, FrozenSet[str]]:
        """Symmetrisierte Decken: y in MB(x) genau dann, wenn auch x in MB(y)"""
        with ThreadPoolExecutor(max_workers=worker_count()) as pool:
            raw = dict(zip(self.variables, pool.map(self.blanket, self.variables)))
        symmetric = {x: frozenset(y for y in raw[x] if x in raw[y]) for x in self.variables}
        for x in self.variables:
            dropped = raw[x] - symmetric[x]
            if dropped:
                self.debug_learn(f"asymmetrisch, entfernt: {sorted(dropped)}", x)
        return symmetric

    def _separator(self, x: str, y: str, blankets: Dict[str, FrozenSet[str]]) -> Optional[Tuple[str, ...]]:
        """Sucht eine trennende Menge zuerst in der kleineren, dann in der größeren Decke"""
        bx, by = blankets[x] - {y}, blankets[y] - {x}
        first, second = sorted((bx, by), key=lambda b: (len(b), sorted(b)))
        tried = set()
        for candidates in (first, second):
            for subset in _subsets(candidates, self.cfg.max_parents):
                if subset in tried:
                    continue
                tried.add(subset)
                if not self._dependent(x, y, subset):
                    return subset
        return None

    def structure(self) -> Pdag:
        blankets = self.blankets()
        neighbours: Dict[str, Set[str]] = {v: set() for v in self.variables}
        sepsets: Dict[FrozenSet[str], FrozenSet[str]] = {}
        for x in self.variables:
            for y in sorted(blankets[x]):
                if y <= x:
                    continue
                separator = self._separator(x, y, blankets)
                if separator is None:
                    neighbours[x].add(y)
                    neighbours[y].add(x)
                else:
                    sepsets[frozenset((x, y))] = frozenset(separator)

        # v-Strukturen a -> c <- b für nicht adjazente a, b mit bekannter Trennmenge ohne c
        proposed: Set[Tuple[str, str]] = set()
        for c in self.variables:
            for a, b in combinations(sorted(neighbours[c]), 2):
                if b in neighbours[a]:
                    continue
                separator = sepsets.get(frozenset((a, b)))
                if separator is not None and c not in separator:
                    proposed.add((a, c))
                    proposed.add((b, c))
        conflicts = {(a, b) for a, b in proposed if (b, a) in proposed}
        for a, b in sorted(conflicts):
            if a < b:
                logger.warning(f"Widersprüchliche Orientierung {a} - {b}, bleibt ungerichtet", LogCategory.LEARN)
        arcs = proposed - conflicts
        arcs = self._break_cycles(arcs)

        undirected = [(a, b) for a in self.variables for b in neighbours[a]
                      if a < b and (a, b) not in arcs and (b, a) not in arcs]
        return apply_orientation_rules(self.variables, sorted(arcs), undirected)

    @staticmethod
    def _break_cycles(arcs: Set[Tuple[str, str]]) -> Set[Tuple[str, str]]:
        """Arcs aus gerichteten Zyklen werden wieder ungerichtet"""
        arcs = set(arcs)
        while True:
            g = nx.DiGraph(sorted(arcs))
            try:
                cycle = nx.find_cycle(g)
            except nx.NetworkXNoCycle:
                return arcs
            logger.warning(f"v-Strukturen bilden einen Zyklus über {[e[0] for e in cycle]}, "
                           "Kanten bleiben ungerichtet", LogCategory.LEARN)
            arcs -= {(a, b) for a, b in cycle}

    def markov_network(self) -> UGraph:
        blankets = self.blankets()
        edges = [(x, y) for x in self.variables for y in blankets[x] if x < y]
        return UGraph(self.variables, edges)


def grow_shrink_mb(d: Optional[Dataset], x: str, cfg: Optional[LearnConfig] = None,
                   tester: Optional[IndependenceTester] = None) -> FrozenSet[str]:
    """Markov-Decke von x per Grow-Shrink"""
    cfg = cfg or LearnConfig()
    return GrowShrink(_tester(d, cfg, tester), cfg).blanket(x)


def gs_structure(d: Optional[Dataset], cfg: Optional[LearnConfig] = None,
                 tester: Optional[IndependenceTester] = None) -> Pdag:
    """Grow-Shrink für Bayes-Netze; liefert einen PDAG"""
    cfg = cfg or LearnConfig()
    result = GrowShrink(_tester(d, cfg, tester), cfg).structure()
    logger.info(f"Grow-Shrink: {len(result.arcs)} gerichtete, {len(result.undirected_edges)} ungerichtete Kanten",
                LogCategory.LEARN)
    return result


def gs_markov_network(d: Optional[Dataset], cfg: Optional[LearnConfig] = None,
                      tester: Optional[IndependenceTester] = None) -> UGraph:
    """Grow-Shrink für Markov-Netze: ungerichteter Graph der symmetrischen Decken"""
    cfg = cfg or LearnConfig()
    return GrowShrink(_tester(d, cfg, tester), cfg).markov_network()
