# pgm_bench/debug_mixin.py
# Version: 2.1.0

import os
from typing import Dict, Optional, Any

from .core import get_config
from .logging_config import logger, LogCategory


class DebugMixin:
    """Universelle Mixin-Klasse für Debug-Funktionalität in allen Komponenten"""

    def _init_debug_config(self, config: Optional[Dict[str, Any]] = None):
        """Initialisiert die Debug-Konfiguration aus dem config-Dict, ohne Dict aus der globalen Config"""
        if config is None:
            config = get_config().get_config()
        self.debug_config = config.get('debugging', {}) or {}

        self.debug_learn_enabled = bool(self.debug_config.get('learn', False))
        self.debug_tests_enabled = bool(self.debug_config.get('tests', False))
        self.debug_scores_enabled = bool(self.debug_config.get('scores', False))
        self.debug_infer_enabled = bool(self.debug_config.get('infer', False))
        self.debug_validate_enabled = bool(self.debug_config.get('validate', False))

        # Debug-Modus aus Umgebungsvariable
        self.debug_mode = os.environ.get('PGM_DEBUG', '0') == '1'

    def _debug_on(self, flag_name: str) -> bool:
        return getattr(self, flag_name, False) or getattr(self, 'debug_mode', False)

    # =========== LERNEN ===========

    def debug_learn(self, message: str, node: Optional[str] = None):
        """Debug-Ausgabe für Strukturlernen"""
        if self._debug_on('debug_learn_enabled'):
            logger.debug(message, LogCategory.LEARN, node)

    def debug_test(self, x: str, y: str, given, p_value: float):
        """Debug-Ausgabe für einzelne CI-Tests"""
        if self._debug_on('debug_tests_enabled'):
            cond = ",".join(sorted(given)) if given else "-"
            logger.debug(f"{x} _||_ {y} | {cond}: p={p_value:.6g}", LogCategory.TEST)

    def debug_score(self, message: str, node: Optional[str] = None):
        """Debug-Ausgabe für Score-Berechnungen"""
        if self._debug_on('debug_scores_enabled'):
            logger.debug(message, LogCategory.SCORE, node)

    # =========== INFERENZ / VALIDIERUNG ===========

    def debug_infer(self, message: str):
        """Debug-Ausgabe für Inferenz"""
        if self._debug_on('debug_infer_enabled'):
            logger.debug(message, LogCategory.INFER)

    def debug_validate(self, message: str, replicate: Optional[int] = None):
        """Debug-Ausgabe für Bootstrap und Kreuzvalidierung"""
        if self._debug_on('debug_validate_enabled'):
            entity = f"#{replicate}" if replicate is not None else None
            logger.debug(message, LogCategory.VALIDATE, entity)
