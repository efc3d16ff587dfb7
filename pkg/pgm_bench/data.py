# pgm_bench/data.py
# Version: 1.4.0

import io
import math
import os
import re
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, TextIO, Tuple, Union

import numpy as np
import pandas as pd

from .const import VariableKind
from .exceptions import ArgumentError, DegenerateVarianceError, IngestionError
from .logging_config import logger, LogCategory

Source = Union[str, os.PathLike, TextIO]


@dataclass(frozen=True)
class VariableMeta:
    """Metadaten einer Variablen: Name, Typ und (bei diskreten Variablen) Stufen"""
    name: str
    kind: VariableKind
    levels: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", VariableKind(self.kind))
        object.__setattr__(self, "levels", tuple(str(level) for level in self.levels))
        if not self.name:
            raise ArgumentError("Variablenname darf nicht leer sein")
        if self.kind == VariableKind.DISCRETE:
            if len(self.levels) < 2:
                raise ArgumentError(f"Diskrete Variable '{self.name}' braucht mindestens zwei Stufen")
            if len(set(self.levels)) != len(self.levels):
                raise ArgumentError(f"Stufen der Variable '{self.name}' sind nicht eindeutig")
        elif self.levels:
            raise ArgumentError(f"Stetige Variable '{self.name}' hat keine Stufen")

    @property
    def is_discrete(self) -> bool:
        return self.kind == VariableKind.DISCRETE

    @property
    def cardinality(self) -> int:
        return len(self.levels)

    def level_index(self, level: str) -> int:
        try:
            return self.levels.index(str(level))
        except ValueError:
            raise ArgumentError(f"'{level}' ist keine Stufe von '{self.name}' {list(self.levels)}")


def discrete(name: str, levels: Sequence[str]) -> VariableMeta:
    return VariableMeta(name, VariableKind.DISCRETE, tuple(levels))


def continuous(name: str) -> VariableMeta:
    return VariableMeta(name, VariableKind.CONTINUOUS)


class Dataset:
    """Unveränderlicher Datensatz mit typisierten Spalten.

    Diskrete Spalten werden als Stufenindizes (int64) gehalten, stetige als float64.
    """

    def __init__(self, variables: Sequence[VariableMeta], columns: Mapping[str, Sequence]):
        self._variables = tuple(variables)
        names = [v.name for v in self._variables]
        if len(set(names)) != len(names):
            raise ArgumentError("Variablennamen müssen eindeutig sein")
        self._meta = {v.name: v for v in self._variables}
        self._columns: Dict[str, np.ndarray] = {}
        n = None
        for meta in self._variables:
            if meta.name not in columns:
                raise ArgumentError(f"Spalte '{meta.name}' fehlt")
            if meta.is_discrete:
                arr = np.array(columns[meta.name], dtype=np.int64, copy=True)
                if arr.size and (arr.min() < 0 or arr.max() >= meta.cardinality):
                    raise ArgumentError(f"Ungültiger Stufenindex in Spalte '{meta.name}'")
            else:
                arr = np.array(columns[meta.name], dtype=np.float64, copy=True)
                if not np.all(np.isfinite(arr)):
                    raise ArgumentError(f"Spalte '{meta.name}' enthält fehlende oder unendliche Werte")
            if arr.ndim != 1:
                raise ArgumentError(f"Spalte '{meta.name}' ist nicht eindimensional")
            if n is None:
                n = arr.shape[0]
            elif arr.shape[0] != n:
                raise ArgumentError("Alle Spalten müssen gleich lang sein")
            arr.flags.writeable = False
            self._columns[meta.name] = arr
        if not n:
            raise ArgumentError("Ein Datensatz braucht mindestens eine Beobachtung")
        self._n = n

    @classmethod
    def from_labels(cls, variables: Sequence[VariableMeta], data: Mapping[str, Sequence]) -> 'Dataset':
        """Baut einen Datensatz aus Stufenbezeichnungen bzw. Zahlenwerten"""
        columns = {}
        for meta in variables:
            values = data[meta.name]
            if meta.is_discrete:
                lookup = {level: i for i, level in enumerate(meta.levels)}
                try:
                    columns[meta.name] = [lookup[str(v)] for v in values]
                except KeyError as e:
                    raise ArgumentError(f"Unbekannte Stufe {e} in Spalte '{meta.name}'")
            else:
                columns[meta.name] = values
        return cls(variables, columns)

    # =========== Zugriff ===========

    @property
    def variables(self) -> Tuple[VariableMeta, ...]:
        return self._variables

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(v.name for v in self._variables)

    @property
    def n(self) -> int:
        return self._n

    def __len__(self) -> int:
        return self._n

    def meta(self, name: str) -> VariableMeta:
        try:
            return self._meta[name]
        except KeyError:
            raise ArgumentError(f"Unbekannte Variable '{name}'")

    def column(self, name: str) -> np.ndarray:
        """Rohspalte: Stufenindizes oder Zahlenwerte"""
        self.meta(name)
        return self._columns[name]

    def labels(self, name: str) -> List[str]:
        meta = self.meta(name)
        if not meta.is_discrete:
            raise ArgumentError(f"Variable '{name}' ist stetig")
        return [meta.levels[i] for i in self._columns[name]]

    def matrix(self, names: Optional[Sequence[str]] = None) -> np.ndarray:
        """n x p Matrix stetiger Spalten"""
        names = list(names) if names is not None else list(self.names)
        for name in names:
            if self.meta(name).is_discrete:
                raise ArgumentError(f"Variable '{name}' ist diskret")
        if not names:
            return np.empty((self._n, 0))
        return np.column_stack([self._columns[name] for name in names])

    @property
    def all_discrete(self) -> bool:
        return all(v.is_discrete for v in self._variables)

    @property
    def all_continuous(self) -> bool:
        return all(not v.is_discrete for v in self._variables)

    def row(self, index: int) -> Dict[str, Union[str, float]]:
        """Beobachtung als Zuordnung Name -> Stufe bzw. Wert"""
        result = {}
        for meta in self._variables:
            value = self._columns[meta.name][index]
            result[meta.name] = meta.levels[value] if meta.is_discrete else float(value)
        return result

    def rows(self) -> Iterator[Dict[str, Union[str, float]]]:
        for i in range(self._n):
            yield self.row(i)

    # =========== Ableitungen ===========

    def take(self, indices: Sequence[int]) -> 'Dataset':
        """Zeilenauswahl (mit Wiederholung möglich, z.B. für Bootstrap)"""
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self._variables, {name: col[idx] for name, col in self._columns.items()})

    def select(self, names: Sequence[str]) -> 'Dataset':
        return Dataset([self.meta(name) for name in names], {name: self._columns[name] for name in names})

    def replace(self, variables: Sequence[VariableMeta], columns: Mapping[str, Sequence]) -> 'Dataset':
        """Neuer Datensatz, in dem einzelne Variablen ersetzt sind"""
        replaced = {v.name: v for v in variables}
        metas = [replaced.get(v.name, v) for v in self._variables]
        cols = dict(self._columns)
        cols.update(columns)
        return Dataset(metas, cols)

    def __repr__(self) -> str:
        kinds = ", ".join(f"{v.name}:{v.kind.value}" for v in self._variables)
        return f"Dataset(n={self._n}, [{kinds}])"


# =========== Einlesen ===========

_LINE_RE = re.compile(r"line (\d+)")


def _open_text(source: Source) -> TextIO:
    if isinstance(source, (str, os.PathLike)):
        try:
            with open(source, "r", newline="") as fh:
                return io.StringIO(fh.read())
        except OSError as e:
            raise IngestionError(f"Datei {source} kann nicht gelesen werden: {e.strerror}")
    return source


def load_schema(source: Source) -> Dict[str, VariableMeta]:
    """Liest eine Schema-Datei: Zeilen 'name,kind[,stufe...]'"""
    stream = _open_text(source)
    schema: Dict[str, VariableMeta] = {}
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        name, kind = parts[0], parts[1] if len(parts) > 1 else ""
        if kind not in (VariableKind.DISCRETE.value, VariableKind.CONTINUOUS.value):
            raise IngestionError(f"Unbekannter Variablentyp '{kind}' im Schema", row=lineno, column=name)
        if name in schema:
            raise IngestionError("Variable im Schema doppelt deklariert", row=lineno, column=name)
        # Diskret ohne Stufen: Stufen werden aus den Daten übernommen
        levels = tuple(parts[2:])
        if kind == VariableKind.DISCRETE.value and not levels:
            schema[name] = _UndeclaredLevels(name)
            continue
        try:
            schema[name] = VariableMeta(name, VariableKind(kind), levels)
        except ArgumentError as e:
            raise IngestionError(str(e), row=lineno, column=name)
    return schema


@dataclass(frozen=True)
class _UndeclaredLevels:
    """Diskrete Schema-Deklaration ohne Stufenliste"""
    name: str
    kind: VariableKind = field(default=VariableKind.DISCRETE)


def load_dataset(source: Source, schema: Optional[Mapping[str, object]] = None) -> Dataset:
    """Liest eine CSV-Datei (Komma-getrennt, erste Zeile = Namen).

    Ohne Schema gilt: rein numerische Spalten sind stetig, alle anderen diskret
    mit sortierten beobachteten Stufen. Deklarationen im Schema haben Vorrang.
    """
    stream = _open_text(source)
    try:
        frame = pd.read_csv(stream, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise IngestionError("Keine Kopfzeile gefunden, Datei ist leer")
    except pd.errors.ParserError as e:
        match = _LINE_RE.search(str(e))
        raise IngestionError("Zeile hat zu viele Felder", row=int(match.group(1)) if match else None)

    for name in frame.columns:
        if not str(name).strip() or str(name).startswith("Unnamed:"):
            raise IngestionError("Spaltenname fehlt in der Kopfzeile", row=1)
    if frame.shape[0] == 0:
        raise IngestionError("Keine Datenzeilen vorhanden")

    schema = dict(schema or {})
    for name in schema:
        if name not in frame.columns:
            raise IngestionError("Im Schema deklarierte Variable fehlt in den Daten", column=name)

    # Zeile 1 ist die Kopfzeile
    missing = frame.isna().to_numpy()
    if missing.any():
        i, j = np.argwhere(missing)[0]
        raise IngestionError("Zeile hat zu wenige Felder", row=int(i) + 2, column=str(frame.columns[j]))
    frame = frame.apply(lambda s: s.str.strip())
    blank = (frame == "").to_numpy()
    if blank.any():
        i, j = np.argwhere(blank)[0]
        raise IngestionError("Leere Zelle", row=int(i) + 2, column=str(frame.columns[j]))

    variables: List[VariableMeta] = []
    columns: Dict[str, np.ndarray] = {}
    for name in frame.columns:
        values = frame[name]
        declared = schema.get(name)
        numeric = pd.to_numeric(values, errors="coerce")
        if declared is None:
            if numeric.notna().all() and np.all(np.isfinite(numeric.to_numpy(dtype=float))):
                meta = continuous(name)
            else:
                observed = sorted(set(values))
                if len(observed) < 2:
                    raise IngestionError(f"Nur eine beobachtete Stufe '{observed[0]}', Stufen im Schema deklarieren",
                                         column=name)
                meta = discrete(name, observed)
        elif isinstance(declared, _UndeclaredLevels):
            observed = sorted(set(values))
            if len(observed) < 2:
                raise IngestionError("Nur eine beobachtete Stufe, Stufen im Schema deklarieren", column=name)
            meta = discrete(name, observed)
        else:
            meta = declared

        if meta.is_discrete:
            lookup = {level: i for i, level in enumerate(meta.levels)}
            codes = values.map(lookup)
            if codes.isna().any():
                i = int(np.argmax(codes.isna().to_numpy()))
                raise IngestionError(f"Unbekannte Stufe '{values.iloc[i]}'", row=i + 2, column=name)
            columns[name] = codes.to_numpy(dtype=np.int64)
        else:
            arr = numeric.to_numpy(dtype=float)
            bad = ~np.isfinite(arr)
            if bad.any():
                i = int(np.argmax(bad))
                raise IngestionError(f"'{values.iloc[i]}' ist kein Zahlenwert", row=i + 2, column=name)
            columns[name] = arr
        variables.append(meta)

    dataset = Dataset(variables, columns)
    logger.debug(f"{dataset!r} geladen", LogCategory.DATA)
    return dataset


# =========== Kontingenztafeln ===========

@dataclass(frozen=True)
class ContingencyTable:
    """Gemeinsame Häufigkeiten; Achsen = targets gefolgt von given"""
    targets: Tuple[str, ...]
    given: Tuple[str, ...]
    levels: Tuple[Tuple[str, ...], ...]
    counts: np.ndarray

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.targets + self.given

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    def axis(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise ArgumentError(f"Variable '{name}' ist nicht in der Tafel")

    def marginal(self, names: Sequence[str]) -> np.ndarray:
        """Randhäufigkeiten über names, Achsen in der angegebenen Reihenfolge"""
        axes = [self.axis(name) for name in names]
        drop = tuple(i for i in range(len(self.variables)) if i not in axes)
        summed = self.counts.sum(axis=drop) if drop else self.counts
        kept = sorted(axes)
        return np.transpose(summed, [kept.index(a) for a in axes])


def contingency_table(d: Dataset, targets: Sequence[str], given: Sequence[str] = ()) -> ContingencyTable:
    """Exakte gemeinsame Häufigkeiten, Nullzellen bleiben erhalten"""
    targets, given = tuple(targets), tuple(given)
    names = targets + given
    if len(set(names)) != len(names):
        raise ArgumentError("Variablen der Kontingenztafel müssen verschieden sein")
    metas = [d.meta(name) for name in names]
    for meta in metas:
        if not meta.is_discrete:
            raise ArgumentError(f"Variable '{meta.name}' ist stetig, Kontingenztafel nicht möglich")
    cards = tuple(meta.cardinality for meta in metas)
    if not names:
        counts = np.array(d.n, dtype=np.int64)
    else:
        flat = np.ravel_multi_index([d.column(name) for name in names], cards)
        counts = np.bincount(flat, minlength=int(np.prod(cards))).astype(np.int64).reshape(cards)
    counts.flags.writeable = False
    return ContingencyTable(targets, given, tuple(meta.levels for meta in metas), counts)


# =========== Gauß-Statistiken ===========

@dataclass(frozen=True)
class GaussStats:
    """Stichprobenumfang, Mittelwerte und Korrelationsmatrix stetiger Variablen"""
    n: int
    names: Tuple[str, ...]
    means: np.ndarray
    correlation: np.ndarray

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ArgumentError(f"Unbekannte Variable '{name}'")

    def submatrix(self, names: Sequence[str]) -> np.ndarray:
        idx = [self.index(name) for name in names]
        return self.correlation[np.ix_(idx, idx)]


def gauss_stats(d: Dataset) -> GaussStats:
    """Mittelwerte und Korrelationen aus der erwartungstreuen (n-1) Kovarianz"""
    if not d.all_continuous:
        raise ArgumentError("gauss_stats benötigt ausschließlich stetige Variablen")
    if d.n < 2:
        raise ArgumentError("gauss_stats benötigt mindestens zwei Beobachtungen")
    x = d.matrix()
    means = x.mean(axis=0)
    centered = x - means
    p = x.shape[1]
    cov = np.empty((p, p))
    # Paarweise Skalarprodukte: identische Spalten ergeben exakt dieselbe Summe
    for i in range(p):
        for j in range(i, p):
            cov[i, j] = cov[j, i] = np.dot(centered[:, i], centered[:, j]) / (d.n - 1)
    variances = np.diag(cov).copy()
    for name, var in zip(d.names, variances):
        if not var > 0.0:
            raise DegenerateVarianceError(f"Spalte '{name}' hat Varianz null", variable=name)
    corr = cov / np.sqrt(np.outer(variances, variances))
    corr = np.clip(corr, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    corr.flags.writeable = False
    means.flags.writeable = False
    return GaussStats(d.n, d.names, means, corr)


# =========== Diskretisierung ===========

def discretize(d: Dataset, bins: int) -> Dataset:
    """Ersetzt stetige Variablen durch Quantil-Klassen q1..qk.

    Klassen sind (c_{k-1}, c_k]; Werte auf einem Schnittpunkt fallen in die untere Klasse.
    """
    if not isinstance(bins, (int, np.integer)) or bins < 2:
        raise ArgumentError("bins muss eine ganze Zahl >= 2 sein")
    replaced: List[VariableMeta] = []
    columns: Dict[str, np.ndarray] = {}
    for meta in d.variables:
        if meta.is_discrete:
            continue
        values = d.column(meta.name)
        if np.unique(values).size < bins:
            raise ArgumentError(f"Spalte '{meta.name}' hat weniger verschiedene Werte als Klassen ({bins})")
        ordered = np.sort(values)
        n = ordered.size
        cuts = np.array([ordered[math.ceil(k * n / bins) - 1] for k in range(1, bins)])
        if np.any(np.diff(cuts) <= 0):
            logger.warning(f"Spalte '{meta.name}': zusammenfallende Quantile, einzelne Klassen bleiben leer",
                           LogCategory.DATA)
        codes = np.searchsorted(cuts, values, side="left")
        replaced.append(discrete(meta.name, [f"q{k}" for k in range(1, bins + 1)]))
        columns[meta.name] = codes
    if not replaced:
        return d
    return d.replace(replaced, columns)
