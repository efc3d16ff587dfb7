# pgm_bench/cli_interface.py
# Version: 3.0.0

import argparse
import itertools
import sys
from typing import Dict, List, Optional, Sequence, Tuple

from termcolor import colored

from .const import Algorithm, InferenceMethod, LossKind, ScoreKind, TestKind
from .exceptions import CliError
from .infer import QueryResult


class CliArgumentParser(argparse.ArgumentParser):
    """ArgumentParser, der bei Fehlern CliError wirft statt selbst zu beenden"""

    def error(self, message: str):
        raise CliError(message)


def format_debug_parameter(key, value, indent=0):
    prefix = "  " * indent
    if isinstance(value, bool):
        symbol = "✅" if value else "❌"
        return f"{prefix}{key}: {symbol}"
    elif isinstance(value, dict):
        lines = [f"{prefix}{key}:"]
        for subkey, subval in value.items():
            lines.append(format_debug_parameter(subkey, subval, indent + 1))
        return "\n".join(lines)
    else:
        return f"{prefix}{key}: {value}"


def format_debug_overview(config: Dict, stream=None):
    """Gibt die wirksame Konfiguration farbig auf stderr aus"""
    stream = stream or sys.stderr
    for key, value in config.items():
        for line in format_debug_parameter(key, value).splitlines():
            print(colored(line, "yellow"), file=stream)


# =========== Argumente ===========

def parse_list(raw: Optional[str]) -> List[str]:
    """'A,B,C' -> ['A', 'B', 'C']; leere Einträge werden ignoriert"""
    if not raw:
        return []
    return [item.strip() for item in raw.split(",") if item.strip()]


def parse_evidence(raw: Optional[str]) -> Dict[str, str]:
    """Harte Evidenz 'X=yes,Y=no'"""
    evidence: Dict[str, str] = {}
    for item in parse_list(raw):
        name, sep, value = item.partition("=")
        name, value = name.strip(), value.strip()
        if not sep or not name or not value:
            raise CliError(f"Evidenz '{item}' hat nicht die Form NAME=STUFE")
        if name in evidence:
            raise CliError(f"Evidenz für '{name}' doppelt angegeben")
        evidence[name] = value
    return evidence


def parse_soft(raw: Optional[Sequence[str]]) -> Dict[str, Tuple[float, ...]]:
    """Weiche Evidenz 'Z=0.9,0.1' (Option mehrfach angebbar)"""
    soft: Dict[str, Tuple[float, ...]] = {}
    for item in raw or ():
        name, sep, values = item.partition("=")
        name = name.strip()
        if not sep or not name:
            raise CliError(f"Weiche Evidenz '{item}' hat nicht die Form NAME=P1,P2,...")
        try:
            vector = tuple(float(v) for v in parse_list(values))
        except ValueError:
            raise CliError(f"Weiche Evidenz für '{name}' enthält keine Zahl")
        if not vector:
            raise CliError(f"Weiche Evidenz für '{name}' ist leer")
        if name in soft:
            raise CliError(f"Weiche Evidenz für '{name}' doppelt angegeben")
        soft[name] = vector
    return soft


def _choices(enum_cls) -> List[str]:
    return [member.value for member in enum_cls]


def _add_data_args(parser: argparse.ArgumentParser):
    parser.add_argument("--data", required=True, help="CSV-Datei, erste Zeile = Variablennamen")
    parser.add_argument("--schema", help="Schema-Datei mit Zeilen 'name,kind[,stufen...]'")


def _add_learn_args(parser: argparse.ArgumentParser):
    parser.add_argument("--algo", choices=_choices(Algorithm))
    parser.add_argument("--test", choices=_choices(TestKind))
    parser.add_argument("--score", choices=_choices(ScoreKind))
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--iss", type=float)
    parser.add_argument("--restarts", type=int)
    parser.add_argument("--tabu", type=int, dest="tabu_length")
    parser.add_argument("--max-parents", type=int, dest="max_parents")


def build_parser() -> CliArgumentParser:
    parser = CliArgumentParser(prog="pgm-bench",
                               description="Bayes-Netze und GGMs aus Tabellendaten lernen und abfragen")
    parser.add_argument("--config", help="YAML-Konfiguration (Standard: $PGM_CONFIG oder ./config.yaml)")
    parser.add_argument("--log-level", type=str.upper, choices=["DEBUG", "INFO", "WARNING", "ERROR", "NONE"])
    parser.add_argument("--debug", action="store_true", help="Debug-Modus mit ausführlichen Logs")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND",
                                     parser_class=CliArgumentParser)
    commands.required = True

    p = commands.add_parser("learn-bn", help="Struktur und Parameter eines Bayes-Netzes lernen")
    _add_data_args(p)
    _add_learn_args(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="Modelldatei (Standard: stdout)")
    p.add_argument("--dot", help="gelernten Graphen als DOT schreiben")
    p.add_argument("--markov-network", action="store_true", dest="markov_network",
                   help="ungerichtetes Markov-Netz per Grow-Shrink statt Bayes-Netz")

    p = commands.add_parser("learn-ggm", help="Graphisches Gauß-Modell per Schrumpfung lernen")
    _add_data_args(p)
    p.add_argument("--select", choices=["threshold", "fdr"])
    p.add_argument("--level", type=float)
    p.add_argument("--out", help="DOT-Datei (Standard: stdout)")
    p.add_argument("--pcor", help="Matrix der partiellen Korrelationen als CSV")

    p = commands.add_parser("relevance", help="Relevanznetz durch Schwellwert auf Korrelationen")
    _add_data_args(p)
    p.add_argument("--threshold", type=float)
    p.add_argument("--out", help="DOT-Datei (Standard: stdout)")

    p = commands.add_parser("infer", help="Bedingte Wahrscheinlichkeiten abfragen")
    p.add_argument("--model", required=True)
    p.add_argument("--query", required=True, help="A[,B...]")
    p.add_argument("--evidence", help="harte Evidenz 'X=yes,Y=no'")
    p.add_argument("--soft", action="append", help="weiche Evidenz 'Z=0.9,0.1' (mehrfach möglich)")
    p.add_argument("--method", choices=_choices(InferenceMethod))
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)

    p = commands.add_parser("dsep", help="d-Separation im Modellgraphen prüfen (Exit 0 = getrennt)")
    p.add_argument("--model", required=True)
    p.add_argument("--x", required=True, help="A[,...]")
    p.add_argument("--y", required=True, help="B[,...]")
    p.add_argument("--given", help="C[,D...]")

    p = commands.add_parser("bootstrap", help="Kantenkonfidenz per nichtparametrischem Bootstrap")
    _add_data_args(p)
    _add_learn_args(p)
    p.add_argument("--replicates", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="Kantenhäufigkeiten als CSV (Standard: stdout)")
    p.add_argument("--averaged-dot", dest="averaged_dot", help="gemitteltes Netz als DOT")
    p.add_argument("--threshold", type=float, default=0.5, help="Schwelle für das gemittelte Netz")

    p = commands.add_parser("cv", help="K-fache Kreuzvalidierung")
    _add_data_args(p)
    _add_learn_args(p)
    p.add_argument("--target")
    p.add_argument("--folds", type=int)
    p.add_argument("--loss", choices=_choices(LossKind))
    p.add_argument("--seed", type=int)
    return parser


# =========== Ausgabe ===========

def format_query(result: QueryResult) -> str:
    """CSV mit einer Zeile je Konfiguration der Anfrageknoten"""
    lines = [",".join(result.query + ("probability",))]
    for combo in itertools.product(*(range(len(levels)) for levels in result.levels)):
        labels = [levels[i] for levels, i in zip(result.levels, combo)]
        lines.append(",".join(labels + [repr(float(result.table[combo]))]))
    return "\n".join(lines) + "\n"
