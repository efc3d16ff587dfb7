# tests/test_cli.py
# Version: 1.1.0

import json

import numpy as np
import pytest

from pgm_bench.cli_interface import format_query
from pgm_bench.dot import emit_dot
from pgm_bench.exceptions import ModelFormatError
from pgm_bench.graph import Dag, Pdag, UGraph
from pgm_bench.infer import Evidence, query
from pgm_bench.main import EXIT_ERROR, EXIT_NOT_SEPARATED, EXIT_OK, main
from pgm_bench.model_file import dumps_model, load_model, loads_model, save_model
from pgm_bench.params import fit_network


def _write_csv(path, d, rows=None):
    rows = range(d.n) if rows is None else rows
    lines = [",".join(d.names)]
    for i in rows:
        cells = []
        for name in d.names:
            meta = d.meta(name)
            value = d.column(name)[i]
            cells.append(meta.levels[int(value)] if meta.is_discrete else repr(float(value)))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture
def converging_csv(tmp_path, converging_data):
    return _write_csv(tmp_path / "converging.csv", converging_data, range(2000))


@pytest.fixture
def marks_csv(tmp_path, marks):
    return _write_csv(tmp_path / "marks.csv", marks)


@pytest.fixture
def asia_model(tmp_path, asia):
    path = tmp_path / "asia.json"
    save_model(asia, str(path))
    return str(path)


def _probabilities(text):
    lines = text.splitlines()
    return lines[0], {tuple(line.split(",")[:-1]): float(line.split(",")[-1]) for line in lines[1:]}


# =========== learn-bn ===========

def test_learn_bn_writes_model_and_dot(tmp_path, converging_csv):
    model, dot = tmp_path / "model.json", tmp_path / "graph.dot"
    code = main(["learn-bn", "--data", converging_csv, "--algo", "hc", "--out", str(model), "--dot", str(dot)])
    assert code == EXIT_OK
    bn = load_model(str(model))
    assert bn.dag.arcs == (("A", "C"), ("B", "C"))
    assert "  A -> C;" in dot.read_text()


def test_learn_bn_to_stdout(converging_csv, capsys):
    assert main(["learn-bn", "--data", converging_csv, "--algo", "gs", "--alpha", "0.001"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["format_version"] == 1
    assert [v["name"] for v in doc["variables"]] == ["A", "B", "C"]


def test_markov_network_to_dot(converging_csv, capsys):
    assert main(["learn-bn", "--data", converging_csv, "--markov-network", "--alpha", "0.001"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "A -> B [dir=none];" in out
    assert "A -> C [dir=none];" in out


def test_markov_network_rejects_model_output(tmp_path, converging_csv, capsys):
    code = main(["learn-bn", "--data", converging_csv, "--markov-network", "--out", str(tmp_path / "m.json")])
    assert code == EXIT_ERROR
    assert capsys.readouterr().err.startswith("error: ")


# =========== infer / dsep ===========

def test_infer_prints_probability_table(asia_model, capsys):
    assert main(["infer", "--model", asia_model, "--query", "lung", "--evidence", "smoke=yes"]) == EXIT_OK
    header, table = _probabilities(capsys.readouterr().out)
    assert header == "lung,probability"
    assert list(table) == [("yes",), ("no",)]
    assert table[("yes",)] == pytest.approx(0.1)


def test_infer_joint_query_with_soft_evidence(asia_model, capsys):
    code = main(["infer", "--model", asia_model, "--query", "lung,smoke", "--soft", "smoke=0.9,0.1"])
    assert code == EXIT_OK
    header, table = _probabilities(capsys.readouterr().out)
    assert header == "lung,smoke,probability"
    assert len(table) == 4
    assert sum(table.values()) == pytest.approx(1.0)
    assert table[("yes", "yes")] == pytest.approx(0.9 * 0.1)


def test_infer_by_sampling(asia_model, capsys):
    code = main(["infer", "--model", asia_model, "--query", "bronc", "--evidence", "smoke=no",
                 "--method", "lw", "--samples", "20000", "--seed", "3"])
    assert code == EXIT_OK
    _, table = _probabilities(capsys.readouterr().out)
    assert table[("yes",)] == pytest.approx(0.3, abs=0.02)


@pytest.mark.parametrize("evidence", ["smoke=maybe", "smoke", "smoke=yes,smoke=no"])
def test_infer_rejects_bad_evidence(asia_model, capsys, evidence):
    code = main(["infer", "--model", asia_model, "--query", "lung", "--evidence", evidence])
    assert code == EXIT_ERROR
    assert capsys.readouterr().err.startswith("error: ")


def test_dsep_exit_codes(asia_model, capsys):
    assert main(["dsep", "--model", asia_model, "--x", "tub", "--y", "smoke"]) == EXIT_OK
    assert capsys.readouterr().out == "true\n"
    code = main(["dsep", "--model", asia_model, "--x", "tub", "--y", "smoke", "--given", "dysp"])
    assert code == EXIT_NOT_SEPARATED
    assert capsys.readouterr().out == "false\n"


# =========== Gauß-Modelle ===========

def test_learn_ggm_writes_dot_and_pcor(tmp_path, marks_csv, capsys):
    pcor = tmp_path / "pcor.csv"
    assert main(["learn-ggm", "--data", marks_csv, "--pcor", str(pcor)]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("digraph g {")
    assert "algebra -> analysis [dir=none" in out
    header = pcor.read_text().splitlines()[0]
    assert header == ",mechanics,vectors,algebra,analysis,statistics"


def test_relevance_network(marks_csv, capsys):
    assert main(["relevance", "--data", marks_csv, "--threshold", "0.99"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "->" not in out
    assert "  statistics;" in out


# =========== Validierung ===========

def test_bootstrap_csv(tmp_path, converging_csv, capsys):
    averaged = tmp_path / "avg.dot"
    code = main(["bootstrap", "--data", converging_csv, "--replicates", "10", "--algo", "gs", "--alpha", "0.01",
                 "--seed", "1", "--averaged-dot", str(averaged)])
    assert code == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "from,to,strength,forward,backward"
    assert any(line.startswith("A,C,1.0,") for line in lines)
    assert "A -> C" in averaged.read_text()


def test_cross_validation_output(converging_csv, capsys):
    code = main(["cv", "--data", converging_csv, "--target", "C", "--folds", "4", "--algo", "hc", "--seed", "2"])
    assert code == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "fold,size,loss"
    assert [line.split(",")[:2] for line in lines[1:5]] == [["1", "500"], ["2", "500"], ["3", "500"], ["4", "500"]]
    assert lines[5].startswith("mean,2000,")
    assert 0.0 < float(lines[5].split(",")[2]) < 0.5


# =========== Fehler ===========

def test_missing_data_file(tmp_path, capsys):
    code = main(["learn-bn", "--data", str(tmp_path / "fehlt.csv")])
    assert code == EXIT_ERROR
    assert capsys.readouterr().err.startswith("error: ")


def test_missing_config_file(tmp_path, converging_csv, capsys):
    code = main(["--config", str(tmp_path / "fehlt.yaml"), "learn-bn", "--data", converging_csv])
    assert code == EXIT_ERROR
    assert "fehlt.yaml" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [[], ["teleport"], ["learn-bn"], ["learn-bn", "--data", "x.csv", "--algo", "sa"]])
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_ERROR
    assert capsys.readouterr().err.startswith("error: ")


def test_config_file_sets_defaults(tmp_path, converging_csv, capsys):
    config = tmp_path / "config.yaml"
    config.write_text("validate:\n  folds: 5\n")
    assert main(["--config", str(config), "cv", "--data", converging_csv, "--target", "C"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 1 + 5 + 1


# =========== DOT ===========

def test_emit_dot_format():
    g = Pdag(["B", "A", "C"], [("A", "B"), ("B", "C", "undirected")])
    assert emit_dot(g) == "digraph g {\n  A;\n  B;\n  C;\n  A -> B;\n  B -> C [dir=none];\n}\n"


def test_emit_dot_quotes_and_styles():
    g = UGraph(["my var", "x"], [("x", "my var")])
    text = emit_dot(g, {("x", "my var"): "style=dotted"})
    assert '  "my var";' in text
    assert '"my var" -> x [dir=none, style=dotted];' in text


# =========== Modelldatei ===========

def test_discrete_model_round_trip(asia):
    restored = loads_model(dumps_model(asia))
    assert restored.dag == asia.dag
    for node in asia.nodes:
        assert restored.levels(node) == asia.levels(node)
        assert np.array_equal(restored.local(node).table, asia.local(node).table)
    assert dumps_model(restored) == dumps_model(asia)


def test_gaussian_model_round_trip(marks):
    dag = Dag(marks.names, [("algebra", "analysis"), ("vectors", "algebra")])
    bn = fit_network(marks, dag)
    restored = loads_model(dumps_model(bn))
    assert restored.local("analysis").coefficients == bn.local("analysis").coefficients
    assert restored.local("analysis").residual_variance == bn.local("analysis").residual_variance


def test_model_format_errors(asia, tmp_path):
    doc = json.loads(dumps_model(asia))
    doc["format_version"] = 2
    with pytest.raises(ModelFormatError):
        loads_model(json.dumps(doc))
    with pytest.raises(ModelFormatError):
        loads_model("{not json")
    del doc["arcs"]
    doc["format_version"] = 1
    with pytest.raises(ModelFormatError):
        loads_model(json.dumps(doc))
    with pytest.raises(ModelFormatError):
        load_model(str(tmp_path / "fehlt.json"))


@pytest.mark.parametrize("yaml_text, key", [
    ("infer:\n  samples: viele\n", "infer.samples"),
    ("infer:\n  chunk_size: [1, 2]\n", "infer.chunk_size"),
])
def test_invalid_config_values_are_reported(tmp_path, asia_model, capsys, yaml_text, key):
    config = tmp_path / "config.yaml"
    config.write_text(yaml_text)
    code = main(["--config", str(config), "infer", "--model", asia_model, "--query", "lung", "--method", "lw"])
    assert code == EXIT_ERROR
    err = capsys.readouterr().err
    assert err.startswith("error: ")
    assert key in err
    assert "Traceback" not in err


@pytest.mark.parametrize("yaml_text", ["learn:\n  alpha: hoch\n", "validate:\n  max_failure_rate: null\n",
                                       "learn:\n  seed: -1\n"])
def test_invalid_learn_and_validate_values(tmp_path, converging_csv, capsys, yaml_text):
    config = tmp_path / "config.yaml"
    config.write_text(yaml_text)
    code = main(["--config", str(config), "bootstrap", "--data", converging_csv, "--replicates", "10"])
    assert code == EXIT_ERROR
    assert capsys.readouterr().err.startswith("error: ")


@pytest.mark.parametrize("method", ["ve", "lw"])
def test_learned_model_answers_like_in_process_query(tmp_path, converging_csv, capsys, method):
    model = tmp_path / "learned.json"
    assert main(["learn-bn", "--data", converging_csv, "--algo", "hc", "--out", str(model)]) == EXIT_OK
    capsys.readouterr()
    bn = load_model(str(model))
    level = bn.levels("A")[0]
    code = main(["infer", "--model", str(model), "--query", "C,B", "--evidence", f"A={level}",
                 "--method", method, "--samples", "5000", "--seed", "4"])
    assert code == EXIT_OK
    expected = format_query(query(bn, ["C", "B"], Evidence(hard={"A": level}), method, samples=5000, seed=4))
    assert capsys.readouterr().out == expected
