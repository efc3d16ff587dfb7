# pgm_bench/core.py
# Version: 2.1.0

import copy
import os
from typing import Any, Dict, Optional

import yaml

from .logging_config import logger, LogCategory


DEFAULT_CONFIG: Dict[str, Any] = {
    "learn": {
        "algo": "hc",
        "test": None,
        "alpha": 0.05,
        "score": "bic",
        "iss": 1.0,
        "restarts": 0,
        "tabu_length": 10,
        "max_parents": 5,
        "perturb": 1,
        "seed": 0,
    },
    "ggm": {
        "select": "fdr",
        "level": 0.05,
        "threshold": 0.8,
    },
    "infer": {
        "method": "ve",
        "samples": 10000,
        "seed": 0,
        "chunk_size": 10000,
    },
    "validate": {
        "replicates": 100,
        "folds": 10,
        "loss": "mis",
        "max_failure_rate": 0.2,
    },
    "debugging": {
        "level": "WARNING",
        "learn": False,
        "tests": False,
        "scores": False,
        "infer": False,
        "validate": False,
    },
    "threads": None,
}

# Singleton-Instanz
config = None


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Verschachteltes Zusammenführen, override gewinnt"""
    merged = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def get_config(path: Optional[str] = None, reload: bool = False) -> 'Config':
    """Gibt die globale Config-Instanz zurück oder erstellt sie, wenn sie nicht existiert."""
    global config
    if config is None or reload or path is not None:
        config_path = path or os.environ.get("PGM_CONFIG") or "config.yaml"
        config = Config(config_path)
    return config


class Config:
    def __init__(self, config_path: Optional[str] = "config.yaml"):
        self.config_path = config_path
        self.config = copy.deepcopy(DEFAULT_CONFIG)
        if config_path:
            self.load_config()

    def load_config(self) -> bool:
        """Lädt die Konfiguration aus der YAML-Datei und legt sie über die Standardwerte."""
        if not os.path.exists(self.config_path):
            logger.debug(f"Keine Konfiguration unter {self.config_path}, verwende Standardwerte",
                         LogCategory.SYSTEM)
            return False
        try:
            with open(self.config_path, 'r') as file:
                loaded = yaml.safe_load(file) or {}
        except (OSError, yaml.YAMLError) as e:
            logger.warning(f"Fehler beim Laden der Konfiguration {self.config_path}: {e}", LogCategory.SYSTEM)
            return False
        if not isinstance(loaded, dict):
            logger.warning(f"Konfiguration {self.config_path} ist kein Mapping, wird ignoriert",
                           LogCategory.SYSTEM)
            return False
        self.config = _merge(DEFAULT_CONFIG, loaded)
        logger.debug(f"Konfiguration aus {self.config_path} erfolgreich geladen.", LogCategory.SYSTEM)
        return True

    def get_value(self, path: str, default: Any = None) -> Any:
        """Verschachtelter Wert in Punktnotation, z.B. get_value("learn.alpha")"""
        current: Any = self.config
        for key in path.split("."):
            if not isinstance(current, dict) or key not in current:
                return default
            current = current[key]
        return current

    def section(self, name: str) -> Dict[str, Any]:
        """Abschnitt als Dict (leer, wenn nicht vorhanden)"""
        value = self.config.get(name)
        return dict(value) if isinstance(value, dict) else {}

    def get_config(self) -> Dict[str, Any]:
        return self.config

    def __getitem__(self, key: str) -> Any:
        return self.config[key]

    def __contains__(self, key: str) -> bool:
        return key in self.config
