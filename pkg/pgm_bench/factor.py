# pgm_bench/factor.py
# Version: 1.0.0

from typing import Mapping, Sequence, Tuple

import numpy as np

from .exceptions import ArgumentError


class Factor:
    """Nichtnegative Tabelle über diskreten Variablen (eine Achse je Variable)"""

    def __init__(self, variables: Sequence[str], cards: Sequence[int], values):
        self.variables: Tuple[str, ...] = tuple(variables)
        self.cards: Tuple[int, ...] = tuple(int(c) for c in cards)
        if len(set(self.variables)) != len(self.variables):
            raise ArgumentError(f"Doppelte Variablen im Faktor: {self.variables}")
        self.values = np.asarray(values, dtype=np.float64).reshape(self.cards)

    @classmethod
    def unit(cls) -> 'Factor':
        return cls((), (), np.array(1.0))

    def axis(self, variable: str) -> int:
        return self.variables.index(variable)

    def card(self, variable: str) -> int:
        return self.cards[self.axis(variable)]

    def transpose(self, order: Sequence[str]) -> 'Factor':
        order = tuple(order)
        if set(order) != set(self.variables) or len(order) != len(self.variables):
            raise ArgumentError("transpose: Variablenmenge stimmt nicht überein")
        axes = [self.axis(v) for v in order]
        return Factor(order, [self.cards[a] for a in axes], np.transpose(self.values, axes))

    def _expanded(self, scope: Sequence[str], cards: Mapping[str, int]) -> np.ndarray:
        """Werte auf scope ausgedehnt (Achsen der Länge 1 für fehlende Variablen)"""
        present = [v for v in scope if v in self.variables]
        arr = np.transpose(self.values, [self.axis(v) for v in present]) if present else self.values
        shape = [cards[v] if v in self.variables else 1 for v in scope]
        return arr.reshape(shape)

    def product(self, other: 'Factor') -> 'Factor':
        scope = list(self.variables) + [v for v in other.variables if v not in self.variables]
        cards = dict(zip(self.variables, self.cards))
        for v, c in zip(other.variables, other.cards):
            if cards.setdefault(v, c) != c:
                raise ArgumentError(f"Kardinalität von '{v}' stimmt nicht überein")
        values = self._expanded(scope, cards) * other._expanded(scope, cards)
        return Factor(scope, [cards[v] for v in scope], values)

    def sum_out(self, variable: str) -> 'Factor':
        a = self.axis(variable)
        keep = [i for i in range(len(self.variables)) if i != a]
        return Factor([self.variables[i] for i in keep], [self.cards[i] for i in keep],
                      self.values.sum(axis=a))

    def reduce(self, variable: str, index: int) -> 'Factor':
        """Fixiert variable auf den Stufenindex index"""
        a = self.axis(variable)
        keep = [i for i in range(len(self.variables)) if i != a]
        return Factor([self.variables[i] for i in keep], [self.cards[i] for i in keep],
                      np.take(self.values, index, axis=a))

    def total(self) -> float:
        return float(self.values.sum())

    def normalize(self) -> 'Factor':
        z = self.total()
        if z <= 0.0:
            raise ArgumentError("Faktor mit Gesamtmasse null kann nicht normiert werden")
        return Factor(self.variables, self.cards, self.values / z)

    def __repr__(self) -> str:
        return f"Factor({', '.join(self.variables) or '-'})"
