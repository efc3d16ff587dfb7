# pgm_bench/exceptions.py
# Version: 1.0.0

from typing import Optional, Sequence


class PgmError(Exception):
    """Basisklasse aller Fehler der Workbench"""


class ArgumentError(PgmError, ValueError):
    """Ungültige Argumente (unbekannte Knoten, überlappende Mengen, falsche Typen)"""


class StructuralError(PgmError):
    """Strukturfehler im Graphen, z.B. ein gerichteter Zyklus"""

    def __init__(self, message: str, cycle: Optional[Sequence[str]] = None):
        self.cycle = tuple(cycle) if cycle else ()
        if self.cycle:
            message = f"{message}: {' -> '.join(self.cycle + (self.cycle[0],))}"
        super().__init__(message)


class IngestionError(PgmError):
    """Fehler beim Einlesen eines Datensatzes, mit Position"""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        self.row = row
        self.column = column
        location = []
        if row is not None:
            location.append(f"Zeile {row}")
        if column is not None:
            location.append(f"Spalte '{column}'")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class DegenerateVarianceError(PgmError):
    """Varianz null (konstante Spalte oder Residuum null)"""

    def __init__(self, message: str, variable: Optional[str] = None):
        self.variable = variable
        super().__init__(message)


class CollinearityError(PgmError):
    """Singuläre Designmatrix in einer Regression"""


class NumericalError(PgmError):
    """Numerisches Problem, z.B. Matrix nicht positiv definit"""

    def __init__(self, message: str, pivot: Optional[str] = None):
        self.pivot = pivot
        super().__init__(message)


class DecomposabilityError(PgmError):
    """Graph ist nicht chordal, Clique-Faktorisierung nicht möglich"""


class InconsistentEvidenceError(PgmError):
    """Evidenz hat Wahrscheinlichkeit null"""


class InsufficientAcceptanceError(PgmError):
    """Logic Sampling hat keine Stichprobe akzeptiert"""


class BootstrapError(PgmError):
    """Zu viele Bootstrap-Replikate sind fehlgeschlagen"""


class ModelFormatError(PgmError):
    """Modelldatei ist fehlerhaft"""


class CliError(PgmError):
    """Fehler in der Kommandozeile"""
