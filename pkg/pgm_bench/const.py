# pgm_bench/const.py
# Version: 2.0.0

import os
from enum import Enum

from .logging_config import logger, LogCategory


class VariableKind(str, Enum):
    """Typ einer Variablen im Datensatz"""
    DISCRETE = "discrete"
    CONTINUOUS = "continuous"


class TestKind(str, Enum):
    """Unterstützte Tests auf bedingte Unabhängigkeit"""
    CHI2 = "chi2"
    G2 = "g2"
    MI = "mi"          # Alias für G2
    FISHER_Z = "zf"
    MI_GAUSS = "mi_g"

    @property
    def is_discrete(self) -> bool:
        return self in (TestKind.CHI2, TestKind.G2, TestKind.MI)


class ScoreKind(str, Enum):
    """Unterstützte Netzwerk-Scores (größer ist besser)"""
    LOGLIK = "loglik"
    AIC = "aic"
    BIC = "bic"
    BDEU = "bdeu"
    MDL = "mdl"        # wird wie BIC behandelt


class Algorithm(str, Enum):
    """Strukturlern-Verfahren"""
    GROW_SHRINK = "gs"
    HILL_CLIMB = "hc"
    HYBRID = "hybrid"


class InferenceMethod(str, Enum):
    VARIABLE_ELIMINATION = "ve"
    LOGIC_SAMPLING = "ls"
    LIKELIHOOD_WEIGHTING = "lw"


class LossKind(str, Enum):
    MISCLASSIFICATION = "mis"
    RSS = "rss"
    LOGL = "logl"


# Standardwerte
DEFAULT_ALPHA = 0.05
DEFAULT_ISS = 1.0
DEFAULT_TABU = 10
DEFAULT_MAX_PARENTS = 5
DEFAULT_RELEVANCE_THRESHOLD = 0.8
DEFAULT_SAMPLE_CHUNK = 10000

# Toleranzen
ROW_SUM_TOL = 1e-12
SCORE_EPS = 1e-9

MODEL_FORMAT_VERSION = 1


def worker_count() -> int:
    """Liefert die Anzahl Worker-Threads.

    PGM_THREADS begrenzt die Anzahl, sonst wird die Anzahl der CPUs verwendet.
    """
    default = os.cpu_count() or 1
    raw = os.environ.get("PGM_THREADS", "").strip()
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"PGM_THREADS='{raw}' ist keine Zahl, verwende {default}", LogCategory.SYSTEM)
        return default
    return max(1, value)
