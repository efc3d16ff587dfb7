# pgm_bench/logging_config.py
# Version: 3.0.0

import logging
import os
import sys
from enum import Enum
from typing import Any, Dict, Optional, Union

from termcolor import colored


class LogLevel(Enum):
    DEBUG = logging.DEBUG
    INFO = logging.INFO
    WARNING = logging.WARNING
    ERROR = logging.ERROR
    CRITICAL = logging.CRITICAL
    NONE = logging.CRITICAL + 10

    @classmethod
    def parse(cls, value: Union[str, int, 'LogLevel'], default: 'LogLevel' = None) -> int:
        """'info', logging.INFO oder LogLevel.INFO -> numerischer Level"""
        if isinstance(value, LogLevel):
            return value.value
        if isinstance(value, int):
            return value
        try:
            return cls[str(value).strip().upper()].value
        except KeyError:
            if default is None:
                raise ValueError(f"Unbekannter Log-Level '{value}'")
            return default.value


class LogCategory:
    """Log-Kategorien, eine je Modul"""
    SYSTEM = "System"
    GRAPH = "Graph"
    DATA = "Data"
    PARAMS = "Params"
    TEST = "Test"
    SCORE = "Score"
    LEARN = "Learn"
    GGM = "GGM"
    INFER = "Infer"
    VALIDATE = "Validate"
    CLI = "CLI"
    ERROR = "Error"


_CATEGORY_COLORS = {
    LogCategory.GRAPH: "cyan",
    LogCategory.DATA: "blue",
    LogCategory.PARAMS: "blue",
    LogCategory.TEST: "magenta",
    LogCategory.SCORE: "magenta",
    LogCategory.LEARN: "green",
    LogCategory.GGM: "green",
    LogCategory.INFER: "yellow",
    LogCategory.VALIDATE: "yellow",
    LogCategory.ERROR: "red",
}


class LogFormatter(logging.Formatter):
    """Knappes Format für INFO, ausführlich für alles andere.

    Im Debug-Modus steht zusätzlich der Thread-Name in jeder Zeile, damit
    Meldungen aus parallelen Replikaten, Folds und Sampling-Blöcken
    zuordenbar bleiben.
    """

    VERBOSE = '%(asctime)s - %(levelname)s - %(message)s'
    THREADED = '%(asctime)s - %(threadName)s - %(levelname)s - %(message)s'
    TERSE = '%(message)s'

    def __init__(self, debug_mode: bool = False):
        self.debug_mode = debug_mode
        super().__init__(self.VERBOSE)

    def format(self, record):
        if self.debug_mode:
            self._style._fmt = self.THREADED
        elif record.levelno == logging.INFO:
            self._style._fmt = self.TERSE
        else:
            self._style._fmt = self.VERBOSE
        return super().format(record)


class Logger:
    """Zentraler Logger der Workbench (Singleton).

    Meldungen tragen ein Kategorie-Präfix und optional das betroffene
    Objekt, z.B. einen Knoten, eine Variable oder eine Replikatnummer.
    """
    _instance = None

    @classmethod
    def get_instance(cls) -> 'Logger':
        if cls._instance is None:
            cls._instance = Logger()
        return cls._instance

    def __init__(self):
        self.logger = logging.getLogger('pgm_bench')
        self.logger.propagate = True
        self.logger.handlers = []

        self.debug_mode = os.environ.get('PGM_DEBUG', '0') == '1'

        # stdout gehört den Kommando-Ausgaben
        self.console_handler = logging.StreamHandler(sys.stderr)
        self.console_handler.setFormatter(LogFormatter(debug_mode=self.debug_mode))
        self.logger.addHandler(self.console_handler)
        self.set_level(LogLevel.DEBUG if self.debug_mode else LogLevel.WARNING)

    def set_level(self, level: Union[str, int, LogLevel]):
        level = LogLevel.parse(level)
        self.logger.setLevel(level)
        self.console_handler.setLevel(level)

    def debug(self, message: str, category: str = LogCategory.SYSTEM, subject: Optional[str] = None):
        self._log(logging.DEBUG, message, category, subject)

    def info(self, message: str, category: str = LogCategory.SYSTEM, subject: Optional[str] = None):
        self._log(logging.INFO, message, category, subject)

    def warning(self, message: str, category: str = LogCategory.SYSTEM, subject: Optional[str] = None):
        self._log(logging.WARNING, message, category, subject)

    def error(self, message: str, category: str = LogCategory.ERROR, subject: Optional[str] = None,
              exception: Optional[BaseException] = None):
        self._log(logging.ERROR, self._with_exception(message, exception), category, subject)

    def critical(self, message: str, category: str = LogCategory.ERROR, subject: Optional[str] = None,
                 exception: Optional[BaseException] = None):
        self._log(logging.CRITICAL, self._with_exception(message, exception), category, subject)

    @staticmethod
    def _with_exception(message: str, exception: Optional[BaseException]) -> str:
        if exception is None:
            return message
        return f"{message}: {type(exception).__name__}: {exception}"

    def _log(self, level: int, message: str, category: str, subject: Optional[str] = None):
        # Präfix nur bauen, wenn die Meldung auch ausgegeben wird
        if not self.logger.isEnabledFor(level):
            return
        color = _CATEGORY_COLORS.get(category)
        prefix = colored(f"[{category}]", color) if color else f"[{category}]"
        if subject is not None:
            prefix = f"{prefix} {subject}"
        self.logger.log(level, f"{prefix} {message}")

    def set_debug_mode(self, enabled: bool = True):
        """Debug-Modus schalten; wirkt auch auf später erzeugte DebugMixin-Objekte"""
        self.debug_mode = enabled
        os.environ['PGM_DEBUG'] = '1' if enabled else '0'
        self.console_handler.setFormatter(LogFormatter(debug_mode=enabled))
        if enabled:
            self.set_level(LogLevel.DEBUG)
        self.debug(f"Debug-Modus {'aktiviert' if enabled else 'deaktiviert'}", LogCategory.SYSTEM)


# Globale Logger-Instanz
logger = Logger.get_instance()


def set_debug_mode(enabled: bool = False) -> Logger:
    logger.set_debug_mode(enabled)
    return logger


def set_logging_level_from_config(config: Dict[str, Any], cli_debug_mode: bool = False):
    """Log-Level aus dem Abschnitt 'debugging' setzen; unbekannte Werte gelten als WARNING"""
    debugging = config.get("debugging") or {}
    logger.set_level(LogLevel.parse(debugging.get("level", "WARNING"), default=LogLevel.WARNING))
    if cli_debug_mode:
        set_debug_mode(True)
