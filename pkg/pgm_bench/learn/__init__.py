# pgm_bench/learn/__init__.py
# Version: 1.1.0

from .config import LearnConfig
from .grow_shrink import GrowShrink, IndependenceTester, grow_shrink_mb, gs_markov_network, gs_structure
from .hill_climb import HillClimber, hill_climb
from .hybrid import hybrid_learn, learn_structure

__all__ = [
    "LearnConfig", "GrowShrink", "IndependenceTester", "grow_shrink_mb", "gs_structure",
    "gs_markov_network", "HillClimber", "hill_climb", "hybrid_learn", "learn_structure",
]
