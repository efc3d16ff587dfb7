# pgm_bench/__init__.py

# Basismodule ohne Abhängigkeiten untereinander zuerst
from pgm_bench.logging_config import logger, LogCategory
from pgm_bench.core import get_config
from pgm_bench.exceptions import (PgmError, ArgumentError, StructuralError, IngestionError,
                                  DegenerateVarianceError, CollinearityError, NumericalError,
                                  DecomposabilityError, InconsistentEvidenceError,
                                  InsufficientAcceptanceError, BootstrapError, ModelFormatError, CliError)

from pgm_bench.graph import (Dag, Pdag, UGraph, MixedGraph, d_separated, u_separated, markov_blanket,
                             moralize, skeleton, v_structures, cpdag, pdag_to_dag, is_chordal, cliques)
from pgm_bench.data import Dataset, VariableMeta, load_dataset, load_schema, contingency_table, gauss_stats
from pgm_bench.params import BayesianNetwork, fit_cpt, fit_gaussian_local, fit_network, joint_probability
from pgm_bench.citests import CITester, TestResult
from pgm_bench.scores import EdgeChange, score, score_delta
from pgm_bench.learn import LearnConfig, grow_shrink_mb, gs_structure, hill_climb, hybrid_learn, learn_structure
from pgm_bench.ggm import learn_ggm, partial_correlations, relevance_network, shrink_correlation, ggm_select
from pgm_bench.infer import Evidence, QueryResult, likelihood_weighting, logic_sampling, query, variable_elimination
from pgm_bench.validate import averaged_network, bootstrap_confidence, cross_validate
from pgm_bench.model_file import dumps_model, load_model, loads_model, save_model
from pgm_bench.dot import emit_dot

__version__ = "2.0.0"
