# pgm_bench/citests.py
# Version: 1.2.0

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from .const import TestKind, worker_count
from .data import ContingencyTable, Dataset, GaussStats, contingency_table, gauss_stats
from .debug_mixin import DebugMixin
from .exceptions import ArgumentError, NumericalError
from .logging_config import logger, LogCategory

MIN_PERMUTATIONS = 100


@dataclass(frozen=True)
class TestResult:
    """Ergebnis eines Tests auf bedingte Unabhängigkeit"""
    statistic: float
    df: Optional[int]
    p_value: float
    test_name: str
    flags: Tuple[str, ...] = ()

    __test__ = False  # kein pytest-Testfall


def _as_kind(kind: Union[str, TestKind]) -> TestKind:
    try:
        kind = TestKind(kind)
    except ValueError:
        raise ArgumentError(f"Unbekannter Test '{kind}'")
    return TestKind.G2 if kind == TestKind.MI else kind


# =========== Diskrete Tests ===========

def _slice_statistic(observed: np.ndarray, kind: TestKind) -> Tuple[float, int]:
    """observed hat die Form (r, c, m); leere Schichten werden verworfen"""
    r, c = observed.shape[:2]
    totals = observed.sum(axis=(0, 1))
    keep = totals > 0
    observed = observed[:, :, keep].astype(np.float64)
    totals = totals[keep].astype(np.float64)
    df = (r - 1) * (c - 1) * int(keep.sum())
    if observed.size == 0:
        return 0.0, df
    rows = observed.sum(axis=1)
    cols = observed.sum(axis=0)
    expected = rows[:, None, :] * cols[None, :, :] / totals[None, None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        if kind == TestKind.CHI2:
            terms = np.where(expected > 0, (observed - expected) ** 2 / expected, 0.0)
        else:
            terms = np.where(observed > 0, 2.0 * observed * np.log(observed / expected), 0.0)
    return max(float(terms.sum()), 0.0), df


def test_discrete(ct: ContingencyTable, kind: Union[str, TestKind] = TestKind.G2) -> TestResult:
    """Pearson-χ² bzw. G² für X _||_ Y | Z, summiert über die Z-Schichten"""
    kind = _as_kind(kind)
    if not kind.is_discrete:
        raise ArgumentError(f"Test '{kind.value}' ist kein diskreter Test")
    if len(ct.targets) != 2:
        raise ArgumentError("Die Kontingenztafel braucht genau zwei Zielvariablen")
    counts = ct.counts
    observed = counts.reshape(counts.shape[0], counts.shape[1], -1)
    statistic, df = _slice_statistic(observed, kind)
    flags = ()
    if df == 0:
        logger.warning(f"Test {ct.targets[0]} _||_ {ct.targets[1]} hat 0 Freiheitsgrade, p = 1", LogCategory.TEST)
        p_value, flags = 1.0, ("zero_df",)
    else:
        p_value = float(stats.chi2.sf(statistic, df))
    return TestResult(statistic, df, min(max(p_value, 0.0), 1.0), kind.value, flags)


def conditional_mutual_information(ct: ContingencyTable) -> float:
    """MI(X;Y|Z) mit natürlichem Logarithmus aus einer Kontingenztafel"""
    counts = ct.counts.reshape(ct.counts.shape[0], ct.counts.shape[1], -1).astype(np.float64)
    n = counts.sum()
    nz = counts.sum(axis=(0, 1))
    nxz = counts.sum(axis=1)
    nyz = counts.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = counts * nz[None, None, :] / (nxz[:, None, :] * nyz[None, :, :])
        terms = np.where(counts > 0, counts / n * np.log(ratio), 0.0)
    return float(terms.sum())


# =========== Gauß-Tests ===========

def partial_correlation(s: GaussStats, x: str, y: str, given: Iterable[str] = ()) -> float:
    """Partielle Korrelation aus der Korrelationsmatrix (Residualkovarianz gegeben Z)"""
    given = tuple(sorted(given))
    names = (x, y) + given
    if len(set(names)) != len(names):
        raise ArgumentError("x, y und die Bedingungsmenge müssen verschieden sein")
    block = s.submatrix(names)
    if not given:
        return float(np.clip(block[0, 1], -1.0, 1.0))
    zz = block[2:, 2:]
    if np.linalg.matrix_rank(zz) < len(given):
        raise NumericalError(f"Bedingungsmatrix für {list(given)} ist singulär")
    residual = block[:2, :2] - block[:2, 2:] @ np.linalg.solve(zz, block[2:, :2])
    if residual[0, 0] <= 0.0 or residual[1, 1] <= 0.0:
        raise NumericalError(f"'{x}' oder '{y}' ist durch {list(given)} vollständig bestimmt")
    return float(np.clip(residual[0, 1] / math.sqrt(residual[0, 0] * residual[1, 1]), -1.0, 1.0))


def _effective_n(s: GaussStats, given: Sequence[str]) -> int:
    n_eff = s.n - len(given) - 3
    if n_eff < 1:
        raise ArgumentError(f"n - |Z| - 3 = {n_eff} ist zu klein für Fishers Z")
    return n_eff


def test_fisher_z(s: GaussStats, x: str, y: str, given: Iterable[str] = ()) -> TestResult:
    """Fishers Z auf der partiellen Korrelation, zweiseitig"""
    given = tuple(sorted(given))
    n_eff = _effective_n(s, given)
    r = partial_correlation(s, x, y, given)
    if abs(r) >= 1.0:
        statistic = math.copysign(np.finfo(float).max, r)
        return TestResult(statistic, None, 0.0, TestKind.FISHER_Z.value, ("perfect_correlation",))
    z = math.sqrt(n_eff) * math.atanh(r)
    return TestResult(z, None, float(min(2.0 * stats.norm.sf(abs(z)), 1.0)), TestKind.FISHER_Z.value)


def test_mi_gaussian(s: GaussStats, x: str, y: str, given: Iterable[str] = ()) -> TestResult:
    """Likelihood-Quotienten-Test -n*ln(1 - r²), ein Freiheitsgrad"""
    given = tuple(sorted(given))
    _effective_n(s, given)
    r = partial_correlation(s, x, y, given)
    if abs(r) >= 1.0:
        return TestResult(np.finfo(float).max, 1, 0.0, TestKind.MI_GAUSS.value, ("perfect_correlation",))
    statistic = max(-s.n * math.log1p(-r * r), 0.0)
    return TestResult(statistic, 1, float(stats.chi2.sf(statistic, 1)), TestKind.MI_GAUSS.value)


# =========== Tester mit Cache ===========

class CITester(DebugMixin):
    """Führt Tests auf einem festen Datensatz aus und cached die Ergebnisse.

    Lernverfahren sehen nur pvalue() und variables; Orakel-Tester in den
    Tests implementieren dieselbe Schnittstelle.
    """

    def __init__(self, d: Dataset, kind: Union[str, TestKind] = TestKind.G2, config: Optional[Dict] = None):
        self._init_debug_config(config)
        self.kind = _as_kind(kind)
        self.d = d
        if self.kind.is_discrete and not d.all_discrete:
            raise ArgumentError(f"Test '{self.kind.value}' benötigt diskrete Daten")
        if not self.kind.is_discrete and not d.all_continuous:
            raise ArgumentError(f"Test '{self.kind.value}' benötigt stetige Daten")
        self._stats = None if self.kind.is_discrete else gauss_stats(d)
        self._cache: Dict[Tuple[str, str, FrozenSet[str]], TestResult] = {}
        self._lock = threading.Lock()

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.d.names

    @property
    def calls(self) -> int:
        return len(self._cache)

    def test(self, x: str, y: str, given: Iterable[str] = ()) -> TestResult:
        x, y = sorted((x, y))
        given = frozenset(given)
        key = (x, y, given)
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached
        z = sorted(given)
        if self.kind.is_discrete:
            result = test_discrete(contingency_table(self.d, [x, y], z), self.kind)
        elif self.kind == TestKind.FISHER_Z:
            result = test_fisher_z(self._stats, x, y, z)
        else:
            result = test_mi_gaussian(self._stats, x, y, z)
        self.debug_test(x, y, z, result.p_value)
        with self._lock:
            self._cache[key] = result
        return result

    def pvalue(self, x: str, y: str, given: Iterable[str] = ()) -> float:
        return self.test(x, y, given).p_value


# =========== Permutationstests ===========

def _group_codes(d: Dataset, given: Sequence[str]) -> np.ndarray:
    if not given:
        return np.zeros(d.n, dtype=np.int64)
    cards = [d.meta(z).cardinality for z in given]
    return np.ravel_multi_index([d.column(z) for z in given], cards)


def _residuals(d: Dataset, target: str, given: Sequence[str]) -> np.ndarray:
    y = d.column(target)
    design = np.column_stack([np.ones(d.n)] + [d.column(z) for z in given])
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    return y - design @ beta


def _residual_statistic(ex: np.ndarray, ey: np.ndarray, n_eff: int, kind: TestKind, n: int) -> float:
    sxx, syy = float(ex @ ex), float(ey @ ey)
    if sxx <= 0.0 or syy <= 0.0:
        return 0.0
    r = min(abs(float(ex @ ey)) / math.sqrt(sxx * syy), 1.0)
    if r >= 1.0:
        return float(np.finfo(float).max)
    if kind == TestKind.FISHER_Z:
        return math.sqrt(n_eff) * math.atanh(r)
    return -n * math.log1p(-r * r)


def permutation_p(d: Dataset, x: str, y: str, given: Iterable[str] = (), kind: Union[str, TestKind] = TestKind.G2,
                  replicates: int = 1000, seed: int = 0) -> TestResult:
    """Permutations-p-Wert (1 + #{T* >= T}) / (B + 1).

    Diskret wird x innerhalb jeder Z-Konfiguration permutiert, stetig werden
    die Residuen von x gegeben Z permutiert. Jede Replikation hat einen eigenen,
    aus seed abgeleiteten Zufallsstrom.
    """
    kind = _as_kind(kind)
    given = tuple(sorted(given))
    if replicates < MIN_PERMUTATIONS:
        raise ArgumentError(f"Mindestens {MIN_PERMUTATIONS} Permutationen nötig, erhalten {replicates}")
    if len({x, y, *given}) != len(given) + 2:
        raise ArgumentError("x, y und die Bedingungsmenge müssen verschieden sein")
    streams = np.random.SeedSequence(seed).spawn(replicates)

    if kind.is_discrete:
        for v in (x, y) + given:
            if not d.meta(v).is_discrete:
                raise ArgumentError(f"Variable '{v}' ist stetig")
        r, c = d.meta(x).cardinality, d.meta(y).cardinality
        groups = _group_codes(d, given)
        m = int(np.prod([d.meta(z).cardinality for z in given])) if given else 1
        xc, yc = d.column(x), d.column(y)
        by_group = np.argsort(groups, kind="stable")

        def statistic(xcol):
            flat = np.ravel_multi_index([xcol, yc, groups], (r, c, m))
            table = np.bincount(flat, minlength=r * c * m).reshape(r, c, m)
            return _slice_statistic(table, kind)[0]

        def permuted(stream):
            rng = np.random.Generator(np.random.PCG64(stream))
            shuffled = np.lexsort((rng.random(d.n), groups))
            xp = np.empty_like(xc)
            xp[by_group] = xc[shuffled]
            return statistic(xp)
    else:
        for v in (x, y) + given:
            if d.meta(v).is_discrete:
                raise ArgumentError(f"Variable '{v}' ist diskret")
        n_eff = d.n - len(given) - 3
        if n_eff < 1:
            raise ArgumentError("n - |Z| - 3 ist zu klein")
        ex, ey = _residuals(d, x, given), _residuals(d, y, given)

        def statistic(res_x):
            return _residual_statistic(res_x, ey, n_eff, kind, d.n)

        def permuted(stream):
            rng = np.random.Generator(np.random.PCG64(stream))
            return statistic(ex[rng.permutation(d.n)])
        xc = ex

    observed = statistic(xc)
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        null = np.fromiter(pool.map(permuted, streams), dtype=np.float64, count=replicates)
    tol = 1e-10 * max(1.0, abs(observed))
    exceed = int(np.count_nonzero(null >= observed - tol))
    p_value = (1 + exceed) / (replicates + 1)
    logger.debug(f"Permutationstest {x} _||_ {y}: T={observed:.6g}, p={p_value:.6g}", LogCategory.TEST)
    return TestResult(observed, None, p_value, f"{kind.value}-perm")


# pytest soll die Testfunktionen beim Import in Testmodule nicht einsammeln
for _fn in (test_discrete, test_fisher_z, test_mi_gaussian):
    _fn.__test__ = False
