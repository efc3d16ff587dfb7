# pgm_bench/model_file.py
# Version: 1.1.0

import json
from typing import Any, Dict, TextIO, Union

import numpy as np

from .const import MODEL_FORMAT_VERSION, VariableKind
from .exceptions import ModelFormatError, PgmError
from .graph import Dag
from .params import BayesianNetwork, Cpt, GaussianLocal


def model_to_dict(bn: BayesianNetwork) -> Dict[str, Any]:
    variables = []
    locals_: Dict[str, Any] = {}
    for node in bn.nodes:
        local = bn.locals[node]
        if isinstance(local, Cpt):
            variables.append({"name": node, "kind": VariableKind.DISCRETE.value, "levels": list(local.levels)})
            entry = {"parents": list(local.parents), "rows": local.table.tolist()}
            if local.uniform_rows:
                entry["uniform_rows"] = list(local.uniform_rows)
        else:
            variables.append({"name": node, "kind": VariableKind.CONTINUOUS.value})
            entry = {"parents": list(local.parents), "intercept": local.intercept,
                     "coefficients": list(local.coefficients), "residual_variance": local.residual_variance}
        locals_[node] = entry
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "variables": variables,
        "arcs": [list(a) for a in bn.dag.arcs],
        "locals": locals_,
    }


def dumps_model(bn: BayesianNetwork) -> str:
    """Textuelle Modelldatei; Gleitkommazahlen in kürzester verlustfreier Darstellung"""
    return json.dumps(model_to_dict(bn), sort_keys=True, indent=2) + "\n"


def model_from_dict(doc: Dict[str, Any]) -> BayesianNetwork:
    if not isinstance(doc, dict):
        raise ModelFormatError("Modelldatei muss ein Objekt enthalten")
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise ModelFormatError(f"Nicht unterstützte format_version {doc.get('format_version')!r}")
    try:
        variables = {v["name"]: v for v in doc["variables"]}
        names = [v["name"] for v in doc["variables"]]
        dag = Dag(names, [tuple(a) for a in doc["arcs"]])
        locals_ = {}
        for name in names:
            entry = doc["locals"][name]
            parents = tuple(entry["parents"])
            if variables[name]["kind"] == VariableKind.DISCRETE.value:
                parent_levels = tuple(tuple(variables[p]["levels"]) for p in parents)
                locals_[name] = Cpt(name, parents, tuple(variables[name]["levels"]), parent_levels,
                                    np.array(entry["rows"], dtype=np.float64), tuple(entry.get("uniform_rows", ())))
            elif variables[name]["kind"] == VariableKind.CONTINUOUS.value:
                locals_[name] = GaussianLocal(name, parents, float(entry["intercept"]),
                                              tuple(entry["coefficients"]), float(entry["residual_variance"]))
            else:
                raise ModelFormatError(f"Unbekannter Variablentyp für '{name}'")
        return BayesianNetwork(dag, locals_)
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError, PgmError) as e:
        raise ModelFormatError(f"Modelldatei fehlerhaft: {e}")


def loads_model(text: str) -> BayesianNetwork:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"Modelldatei ist kein gültiges JSON (Zeile {e.lineno}): {e.msg}")
    return model_from_dict(doc)


def save_model(bn: BayesianNetwork, target: Union[str, TextIO]) -> None:
    text = dumps_model(bn)
    if isinstance(target, str):
        with open(target, "w") as fh:
            fh.write(text)
    else:
        target.write(text)


def load_model(source: Union[str, TextIO]) -> BayesianNetwork:
    if isinstance(source, str):
        try:
            with open(source, "r") as fh:
                return loads_model(fh.read())
        except OSError as e:
            raise ModelFormatError(f"Modelldatei {source} kann nicht gelesen werden: {e.strerror}")
    return loads_model(source.read())
