# pgm_bench/learn/hybrid.py
# Version: 1.0.2

from typing import Optional, Union

from ..const import Algorithm
from ..data import Dataset
from ..graph import Dag, Pdag, UGraph
from ..logging_config import logger, LogCategory
from .config import LearnConfig
from .grow_shrink import IndependenceTester, gs_markov_network, gs_structure
from .hill_climb import hill_climb


def hybrid_learn(d: Dataset, cfg: Optional[LearnConfig] = None,
                 tester: Optional[IndependenceTester] = None) -> Dag:
    """Zweiphasig: Grow-Shrink liefert die Kandidatenkanten, Hill Climbing sucht darin"""
    cfg = cfg or LearnConfig()
    superstructure = gs_structure(d, cfg, tester)
    allowed = [e.pair for e in superstructure.edges]
    logger.info(f"Hybrid: Suchraum auf {len(allowed)} Kandidatenkanten beschränkt", LogCategory.LEARN)
    return hill_climb(d, cfg, allowed=allowed)


def learn_structure(d: Dataset, cfg: Optional[LearnConfig] = None,
                    markov_network: bool = False) -> Union[Dag, Pdag, UGraph]:
    """Wählt das Lernverfahren nach cfg.algo"""
    cfg = cfg or LearnConfig()
    if markov_network:
        return gs_markov_network(d, cfg)
    if cfg.algo == Algorithm.GROW_SHRINK:
        return gs_structure(d, cfg)
    if cfg.algo == Algorithm.HYBRID:
        return hybrid_learn(d, cfg)
    return hill_climb(d, cfg)
