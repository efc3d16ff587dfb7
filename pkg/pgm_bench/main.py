# pgm_bench/main.py
# Version: 3.1.0

import os
import sys
from typing import Callable, Dict, List, Optional

import pandas as pd

from .cli_interface import build_parser, format_debug_overview, format_query, parse_evidence, parse_list, parse_soft
from .const import InferenceMethod
from .core import get_config, Config
from .data import Dataset, gauss_stats, load_dataset, load_schema
from .dot import emit_dot
from .exceptions import CliError, PgmError
from .ggm import learn_ggm, relevance_network
from .graph import Dag, d_separated, pdag_to_dag
from .infer import Evidence, query
from .learn import LearnConfig, learn_structure
from .logging_config import logger, LogCategory, set_logging_level_from_config, set_debug_mode
from .model_file import dumps_model, load_model
from .params import fit_network
from .validate import averaged_network, bootstrap_confidence, cross_validate

EXIT_OK = 0
EXIT_NOT_SEPARATED = 1
EXIT_ERROR = 2


def _write(text: str, path: Optional[str]) -> None:
    """Schreibt in die Datei oder, ohne Pfad, nach stdout"""
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as e:
        raise CliError(f"{path} kann nicht geschrieben werden: {e.strerror}")
    logger.info(f"{path} geschrieben", LogCategory.CLI)


def _load_data(args) -> Dataset:
    schema = load_schema(args.schema) if args.schema else None
    return load_dataset(args.data, schema)


def _learn_config(args, config: Config) -> LearnConfig:
    return LearnConfig.from_config(
        config,
        algo=args.algo, test=args.test, score=args.score, alpha=args.alpha, iss=args.iss,
        restarts=args.restarts, tabu_length=args.tabu_length, max_parents=args.max_parents,
        seed=getattr(args, "seed", None) if args.command == "learn-bn" else None,
    )


def _setting(value, config: Config, path: str, cast: Optional[Callable] = None):
    """CLI-Wert vor Konfigurationswert; cast wandelt um und meldet ungültige Werte als CliError"""
    if value is None:
        value = config.get_value(path)
    if cast is None:
        return value
    try:
        return cast(value)
    except (TypeError, ValueError):
        raise CliError(f"Wert {value!r} für '{path}' ist kein gültiger {cast.__name__}-Wert")


# =========== Kommandos ===========

def cmd_learn_bn(args, config: Config) -> int:
    d = _load_data(args)
    cfg = _learn_config(args, config)
    if args.markov_network:
        if args.out:
            raise CliError("--out schreibt ein Bayes-Netz und ist mit --markov-network nicht kombinierbar")
        g = learn_structure(d, cfg, markov_network=True)
        _write(emit_dot(g), args.dot)
        return EXIT_OK
    g = learn_structure(d, cfg)
    dag = g if isinstance(g, Dag) else pdag_to_dag(g)
    bn = fit_network(d, dag, cfg.iss)
    _write(dumps_model(bn), args.out)
    if args.dot:
        _write(emit_dot(g), args.dot)
    return EXIT_OK


def cmd_learn_ggm(args, config: Config) -> int:
    d = _load_data(args)
    method = _setting(args.select, config, "ggm.select")
    level = _setting(args.level, config, "ggm.level", float)
    result = learn_ggm(d, method, level)
    styles = {pair: "style=dotted" for pair in result.negative_edges()}
    _write(emit_dot(result.edges, styles), args.out)
    if args.pcor:
        frame = pd.DataFrame(result.pcor, index=result.labels, columns=result.labels)
        _write(frame.to_csv(), args.pcor)
    return EXIT_OK


def cmd_relevance(args, config: Config) -> int:
    d = _load_data(args)
    threshold = _setting(args.threshold, config, "ggm.threshold", float)
    stats = gauss_stats(d)
    g = relevance_network(stats.correlation, threshold, stats.names)
    _write(emit_dot(g), args.out)
    return EXIT_OK


def cmd_infer(args, config: Config) -> int:
    bn = load_model(args.model)
    evidence = Evidence(hard=parse_evidence(args.evidence), soft=parse_soft(args.soft))
    method = _setting(args.method, config, "infer.method")
    samples = _setting(args.samples, config, "infer.samples", int)
    seed = _setting(args.seed, config, "infer.seed", int)
    chunk_size = _setting(None, config, "infer.chunk_size", int)
    result = query(bn, parse_list(args.query), evidence, method, samples, seed, chunk_size)
    if result.method == InferenceMethod.LOGIC_SAMPLING.value:
        logger.info(f"{result.accepted} von {result.samples} Stichproben akzeptiert", LogCategory.CLI)
    elif result.method == InferenceMethod.LIKELIHOOD_WEIGHTING.value:
        logger.info(f"Effektive Stichprobengröße {result.effective_weight:.1f}", LogCategory.CLI)
    _write(format_query(result), None)
    return EXIT_OK


def cmd_dsep(args, config: Config) -> int:
    bn = load_model(args.model)
    separated = d_separated(bn.dag, parse_list(args.x), parse_list(args.y), parse_list(args.given))
    _write("true\n" if separated else "false\n", None)
    return EXIT_OK if separated else EXIT_NOT_SEPARATED


def cmd_bootstrap(args, config: Config) -> int:
    d = _load_data(args)
    cfg = _learn_config(args, config)
    conf = bootstrap_confidence(
        d, cfg,
        replicates=_setting(args.replicates, config, "validate.replicates", int),
        seed=_setting(args.seed, config, "learn.seed", int),
        max_failure_rate=_setting(None, config, "validate.max_failure_rate", float),
    )
    frame = pd.DataFrame(conf.rows(), columns=["from", "to", "strength", "forward", "backward"])
    _write(frame.to_csv(index=False), args.out)
    if args.averaged_dot:
        _write(emit_dot(averaged_network(conf, args.threshold)), args.averaged_dot)
    return EXIT_OK


def cmd_cv(args, config: Config) -> int:
    d = _load_data(args)
    cfg = _learn_config(args, config)
    result = cross_validate(
        d, cfg,
        folds=_setting(args.folds, config, "validate.folds", int),
        loss=_setting(args.loss, config, "validate.loss"),
        target=args.target,
        seed=_setting(args.seed, config, "learn.seed", int),
        iss=cfg.iss,
    )
    lines = ["fold,size,loss"]
    lines += [f"{i + 1},{size},{loss!r}" for i, (size, loss) in enumerate(zip(result.sizes, result.losses))]
    lines.append(f"mean,{d.n},{result.mean!r}")
    _write("\n".join(lines) + "\n", None)
    return EXIT_OK


COMMANDS: Dict[str, Callable] = {
    "learn-bn": cmd_learn_bn,
    "learn-ggm": cmd_learn_ggm,
    "relevance": cmd_relevance,
    "infer": cmd_infer,
    "dsep": cmd_dsep,
    "bootstrap": cmd_bootstrap,
    "cv": cmd_cv,
}


def _report(message: str) -> int:
    print("error: " + " ".join(str(message).split()), file=sys.stderr)
    return EXIT_ERROR


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except CliError as e:
        return _report(str(e))

    if args.config and not os.path.isfile(args.config):
        return _report(f"Konfigurationsdatei {args.config} nicht gefunden")
    config = get_config(args.config, reload=True)
    set_logging_level_from_config(config.get_config(), args.debug)
    if args.log_level:
        logger.set_level(args.log_level)
    if args.debug:
        format_debug_overview(config.get_config())

    threads = config.get_value("threads")
    if threads and not os.environ.get("PGM_THREADS"):
        os.environ["PGM_THREADS"] = str(threads)

    try:
        return COMMANDS[args.command](args, config)
    except PgmError as e:
        logger.debug(f"{type(e).__name__} in '{args.command}'", LogCategory.CLI)
        return _report(str(e))
    finally:
        if args.debug:
            set_debug_mode(False)


if __name__ == "__main__":
    sys.exit(main())
