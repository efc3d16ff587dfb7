# pgm_bench/learn/config.py
# Version: 1.1.0

from dataclasses import dataclass, fields, replace
from typing import Any, Mapping, Optional, Union

from ..const import (Algorithm, DEFAULT_ALPHA, DEFAULT_ISS, DEFAULT_MAX_PARENTS, DEFAULT_TABU,
                     ScoreKind, TestKind)
from ..data import Dataset
from ..exceptions import ArgumentError


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


@dataclass(frozen=True)
class LearnConfig:
    """Parameter der Strukturlerner.

    test = None wählt den Test passend zu den Daten (g2 diskret, zf stetig).
    """
    test: Optional[TestKind] = None
    alpha: float = DEFAULT_ALPHA
    score: ScoreKind = ScoreKind.BIC
    iss: float = DEFAULT_ISS
    restarts: int = 0
    tabu_length: int = DEFAULT_TABU
    max_parents: int = DEFAULT_MAX_PARENTS
    perturb: int = 1
    seed: int = 0
    algo: Algorithm = Algorithm.HILL_CLIMB

    def __post_init__(self):
        try:
            if self.test is not None:
                object.__setattr__(self, "test", TestKind(self.test))
            object.__setattr__(self, "score", ScoreKind(self.score))
            object.__setattr__(self, "algo", Algorithm(self.algo))
        except ValueError as e:
            raise ArgumentError(str(e))
        for name in ("alpha", "iss"):
            if not _is_number(getattr(self, name)):
                raise ArgumentError(f"{name} muss eine Zahl sein, erhalten {getattr(self, name)!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ArgumentError(f"alpha muss in (0, 1) liegen, erhalten {self.alpha}")
        if self.iss < 0:
            raise ArgumentError("iss muss >= 0 sein")
        for name, minimum in (("restarts", 0), ("tabu_length", 0), ("max_parents", 1), ("perturb", 1), ("seed", 0)):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
                raise ArgumentError(f"{name} muss eine ganze Zahl >= {minimum} sein, erhalten {value!r}")

    def test_for(self, d: Dataset) -> TestKind:
        if self.test is not None:
            return self.test
        return TestKind.G2 if d.all_discrete else TestKind.FISHER_Z

    def with_overrides(self, **overrides: Any) -> 'LearnConfig':
        """Kopie mit überschriebenen Werten; None bedeutet 'nicht gesetzt'"""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    @classmethod
    def from_config(cls, config: Union[Mapping[str, Any], Any], **overrides: Any) -> 'LearnConfig':
        """Erzeugt die Konfiguration aus dem Abschnitt 'learn' der YAML-Konfiguration"""
        section = config.section("learn") if hasattr(config, "section") else dict(config.get("learn", {}) or {})
        names = {f.name for f in fields(cls)}
        values = {k: v for k, v in section.items() if k in names and v is not None}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)
