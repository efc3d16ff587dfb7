# pgm_bench/ggm.py
# Version: 1.1.0

import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, stats

from .const import DEFAULT_RELEVANCE_THRESHOLD
from .data import Dataset
from .exceptions import ArgumentError, DegenerateVarianceError, NumericalError
from .graph import UGraph
from .logging_config import logger, LogCategory

Pair = FrozenSet[str]


@dataclass(frozen=True)
class ShrinkageEstimate:
    """Geschrumpfte Korrelationsmatrix R* = lambda*I + (1-lambda)*R"""
    correlation: np.ndarray
    lambda_: float
    labels: Tuple[str, ...]
    n: int


@dataclass(frozen=True)
class GgmResult:
    """Partielle Korrelationen und ausgewählte Kanten"""
    pcor: np.ndarray
    labels: Tuple[str, ...]
    edges: UGraph
    method: str
    p_values: Dict[Pair, float] = field(default_factory=dict)
    q_values: Dict[Pair, float] = field(default_factory=dict)
    shrinkage: Optional[float] = None

    def pcor_of(self, a: str, b: str) -> float:
        return float(self.pcor[self.labels.index(a), self.labels.index(b)])

    def negative_edges(self) -> Tuple[Tuple[str, str], ...]:
        """Kanten mit negativer partieller Korrelation (werden gepunktet gezeichnet)"""
        return tuple((a, b) for a, b in self.edges.undirected_edges if self.pcor_of(a, b) < 0)


def _labels(labels: Optional[Sequence[str]], p: int) -> Tuple[str, ...]:
    if labels is None:
        return tuple(f"X{i + 1}" for i in range(p))
    labels = tuple(labels)
    if len(labels) != p or len(set(labels)) != p:
        raise ArgumentError(f"Es werden {p} eindeutige Bezeichnungen benötigt")
    return labels


def _check_square(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ArgumentError("Quadratische Matrix erwartet")
    if not np.allclose(c, c.T, atol=1e-12):
        raise ArgumentError("Matrix ist nicht symmetrisch")
    return c


def shrink_correlation(d: Dataset, lambda_override: Optional[float] = None) -> ShrinkageEstimate:
    """James-Stein-artige Schrumpfung der Korrelationsmatrix gegen die Einheitsmatrix.

    lambda = sum_{i!=j} Var(r_ij) / sum_{i!=j} r_ij^2, begrenzt auf [0, 1].
    Ein Nenner von null ergibt lambda = 1.
    """
    if not d.all_continuous:
        raise ArgumentError("shrink_correlation benötigt ausschließlich stetige Variablen")
    n, p = d.n, len(d.names)
    if n < 3 or p < 2:
        raise ArgumentError(f"Mindestens 3 Beobachtungen und 2 Variablen nötig (n={n}, p={p})")
    x = d.matrix()
    sd = x.std(axis=0, ddof=1)
    for name, s in zip(d.names, sd):
        if not s > 0.0:
            raise DegenerateVarianceError(f"Spalte '{name}' hat Varianz null", variable=name)
    xs = (x - x.mean(axis=0)) / sd
    products = xs.T @ xs
    r = products / (n - 1)
    w_mean = products / n
    squares = xs ** 2
    # Var(r_ij) = n / (n-1)^3 * sum_k (w_kij - w_mean_ij)^2
    var_r = n / (n - 1) ** 3 * (squares.T @ squares - n * w_mean ** 2)
    off = ~np.eye(p, dtype=bool)
    denominator = float((r[off] ** 2).sum())
    if lambda_override is not None:
        if not 0.0 <= lambda_override <= 1.0:
            raise ArgumentError("lambda muss in [0, 1] liegen")
        lam = float(lambda_override)
    elif denominator == 0.0:
        lam = 1.0
    else:
        lam = float(min(max(var_r[off].sum() / denominator, 0.0), 1.0))
    shrunk = (1.0 - lam) * r
    shrunk = (shrunk + shrunk.T) / 2.0
    np.fill_diagonal(shrunk, 1.0)
    shrunk = np.clip(shrunk, -1.0, 1.0)
    logger.debug(f"Schrumpfungsintensität lambda={lam:.6f} (n={n}, p={p})", LogCategory.GGM)
    return ShrinkageEstimate(shrunk, lam, d.names, n)


def partial_correlations(c: np.ndarray, labels: Optional[Sequence[str]] = None) -> np.ndarray:
    """pcor_ij = -Omega_ij / sqrt(Omega_ii * Omega_jj) mit Omega = c^-1"""
    c = _check_square(c)
    labels = _labels(labels, c.shape[0])
    factor, info = linalg.lapack.dpotrf(c, lower=1, clean=1)
    if info > 0:
        pivot = labels[info - 1]
        raise NumericalError(f"Matrix ist nicht positiv definit (Pivot '{pivot}')", pivot=pivot)
    if info < 0:
        raise NumericalError(f"Cholesky-Zerlegung fehlgeschlagen (info={info})")
    omega = linalg.cho_solve((factor, True), np.eye(c.shape[0]))
    scale = np.sqrt(np.diag(omega))
    pcor = -omega / np.outer(scale, scale)
    pcor = (pcor + pcor.T) / 2.0
    np.fill_diagonal(pcor, 1.0)
    return np.clip(pcor, -1.0, 1.0)


def relevance_network(c: np.ndarray, threshold: float = DEFAULT_RELEVANCE_THRESHOLD,
                      labels: Optional[Sequence[str]] = None) -> UGraph:
    """Kante i - j genau dann, wenn |c_ij| >= threshold"""
    c = _check_square(c)
    if not 0.0 < threshold < 1.0:
        raise ArgumentError("threshold muss in (0, 1) liegen")
    labels = _labels(labels, c.shape[0])
    rows, cols = np.nonzero(np.triu(np.abs(c) >= threshold, k=1))
    return UGraph(labels, [(labels[i], labels[j]) for i, j in zip(rows, cols)])


def benjamini_hochberg(p_values: np.ndarray) -> np.ndarray:
    """q-Werte der BH-Step-up-Prozedur"""
    p_values = np.asarray(p_values, dtype=np.float64)
    m = p_values.size
    if m == 0:
        return p_values.copy()
    order = np.argsort(p_values, kind="stable")
    ranked = p_values[order] * m / np.arange(1, m + 1)
    ranked = np.minimum.accumulate(ranked[::-1])[::-1]
    q = np.empty(m)
    q[order] = np.minimum(ranked, 1.0)
    return q


def ggm_select(pcor: np.ndarray, n: int, method: str = "fdr", level: float = 0.05,
               labels: Optional[Sequence[str]] = None) -> GgmResult:
    """Kantenwahl per Schwelle auf |pcor| oder per FDR (Benjamini-Hochberg)"""
    pcor = _check_square(pcor)
    p = pcor.shape[0]
    labels = _labels(labels, p)
    if not 0.0 < level <= 1.0:
        raise ArgumentError(f"level muss in (0, 1] liegen, erhalten {level}")
    rows, cols = np.triu_indices(p, k=1)
    values = pcor[rows, cols]
    pairs = [frozenset((labels[i], labels[j])) for i, j in zip(rows, cols)]

    if method == "threshold":
        chosen = np.abs(values) >= level
        graph = UGraph(labels, [tuple(sorted(pair)) for pair, keep in zip(pairs, chosen) if keep])
        return GgmResult(pcor, labels, graph, method)
    if method != "fdr":
        raise ArgumentError(f"Unbekannte Auswahlmethode '{method}'")

    n_eff = n - (p - 2) - 3
    if n_eff < 1:
        logger.warning(f"n={n} zu klein für p={p}, Fishers Z mit effektivem n=1 (nur näherungsweise)",
                       LogCategory.GGM)
        n_eff = 1
    clipped = np.clip(values, -1.0, 1.0)
    with np.errstate(divide="ignore"):
        z = math.sqrt(n_eff) * np.arctanh(clipped)
    p_values = np.where(np.abs(clipped) >= 1.0, 0.0, np.minimum(2.0 * stats.norm.sf(np.abs(z)), 1.0))
    q_values = benjamini_hochberg(p_values)
    chosen = (q_values <= level) & (values != 0.0)
    graph = UGraph(labels, [tuple(sorted(pair)) for pair, keep in zip(pairs, chosen) if keep])
    logger.debug(f"FDR-Auswahl: {int(chosen.sum())} von {len(pairs)} Paaren bei q <= {level}", LogCategory.GGM)
    return GgmResult(pcor, labels, graph, method,
                     dict(zip(pairs, p_values.tolist())), dict(zip(pairs, q_values.tolist())))


def learn_ggm(d: Dataset, method: str = "fdr", level: float = 0.05,
              lambda_override: Optional[float] = None) -> GgmResult:
    """Schrumpfung, partielle Korrelationen und Kantenwahl in einem Schritt"""
    estimate = shrink_correlation(d, lambda_override)
    pcor = partial_correlations(estimate.correlation, estimate.labels)
    result = ggm_select(pcor, d.n, method, level, estimate.labels)
    logger.info(f"GGM: lambda={estimate.lambda_:.4f}, {len(result.edges.edges)} Kanten", LogCategory.GGM)
    return GgmResult(result.pcor, result.labels, result.edges, result.method,
                     result.p_values, result.q_values, estimate.lambda_)
