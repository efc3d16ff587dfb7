# tests/test_params.py
# Version: 1.0.0

import itertools
import math

import numpy as np
import pytest

from helpers import cpt, discrete_dataset, exact_joint, network
from pgm_bench.data import Dataset, continuous, discrete
from pgm_bench.exceptions import ArgumentError, CollinearityError, DecomposabilityError, DegenerateVarianceError
from pgm_bench.graph import Dag, UGraph
from pgm_bench.infer import sample_dataset
from pgm_bench.params import (BayesianNetwork, Cpt, GaussianLocal, clique_factorization, fit_cpt,
                              fit_gaussian_local, fit_network, joint_probability, log_likelihood,
                              row_log_likelihoods)


# =========== CPTs ===========

def test_relative_frequencies_without_prior():
    d = discrete_dataset({"A": ["yes"] * 3 + ["no"] * 7}, {"A": ["yes", "no"]})
    table = fit_cpt(d, "A", iss=0).table
    assert table[0].tolist() == pytest.approx([0.3, 0.7])


def test_dirichlet_prior_spreads_iss_over_cells():
    d = discrete_dataset({"A": ["yes"] * 3 + ["no"] * 7}, {"A": ["yes", "no"]})
    table = fit_cpt(d, "A", iss=1.0).table
    assert table[0].tolist() == pytest.approx([3.5 / 11, 7.5 / 11])


def test_rows_follow_parent_configurations():
    d = discrete_dataset({
        "P": ["a", "a", "a", "b", "b"],
        "Q": ["x", "y", "y", "x", "x"],
        "C": ["0", "1", "1", "0", "1"],
    })
    fitted = fit_cpt(d, "C", ["P", "Q"], iss=0)
    # (a,x), (a,y), (b,x), (b,y)
    assert fitted.table.tolist() == [[1.0, 0.0], [0.0, 1.0], [0.5, 0.5], [0.5, 0.5]]
    assert fitted.uniform_rows == (3,)
    assert fitted.flagged
    assert fitted.probability("1", {"P": "b", "Q": "x"}) == 0.5


def test_unobserved_configuration_is_logged(caplog):
    d = discrete_dataset({"P": ["a", "a"], "C": ["0", "1"]}, {"P": ["a", "b"]})
    fit_cpt(d, "C", ["P"], iss=0)
    assert "gleichverteilt" in caplog.text


def test_prior_leaves_no_flagged_rows():
    d = discrete_dataset({"P": ["a", "a"], "C": ["0", "1"]}, {"P": ["a", "b"]})
    fitted = fit_cpt(d, "C", ["P"], iss=2.0)
    assert not fitted.flagged
    assert fitted.table[1].tolist() == pytest.approx([0.5, 0.5])


def test_fit_cpt_argument_checks():
    d = Dataset([continuous("x"), discrete("A", ["a", "b"])], {"x": [0.0, 1.0], "A": [0, 1]})
    with pytest.raises(ArgumentError):
        fit_cpt(d, "A", ["x"])
    with pytest.raises(ArgumentError):
        fit_cpt(d, "A", iss=-1)


@pytest.mark.parametrize("rows", [[[0.5, 0.6]], [[1.2, -0.2]], [[0.5, 0.5], [0.5, 0.5]]])
def test_cpt_validation(rows):
    with pytest.raises(ArgumentError):
        Cpt("A", (), ("a", "b"), (), np.array(rows))


def test_cpt_rows_sum_to_one_after_fitting(asia):
    d = sample_dataset(asia, 500, seed=1)
    bn = fit_network(d, asia.dag, iss=0)
    for node in bn.nodes:
        assert np.allclose(bn.local(node).table.sum(axis=1), 1.0, atol=1e-12)


# =========== Gauß-Regression ===========

def test_gaussian_regression_recovers_coefficients():
    rng = np.random.default_rng(3)
    n = 2000
    a = rng.normal(size=n)
    b = rng.normal(size=n)
    y = 1.5 + 2.0 * a - 0.5 * b + rng.normal(scale=0.3, size=n)
    d = Dataset([continuous("a"), continuous("b"), continuous("y")], {"a": a, "b": b, "y": y})
    local = fit_gaussian_local(d, "y", ["a", "b"])
    assert local.intercept == pytest.approx(1.5, abs=0.05)
    assert local.coefficients == pytest.approx((2.0, -0.5), abs=0.05)
    design = np.column_stack([np.ones(n), a, b])
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    rss = float(((y - design @ beta) ** 2).sum())
    assert local.residual_variance == pytest.approx(rss / (n - 3))


def test_exact_copy_has_degenerate_variance():
    x = [0.3, 1.2, 2.2, 3.9, 4.1]
    d = Dataset([continuous("x"), continuous("y")], {"x": x, "y": x})
    with pytest.raises(DegenerateVarianceError) as info:
        fit_gaussian_local(d, "y", ["x"])
    assert info.value.variable == "y"


def test_collinear_parents():
    a = np.array([0.1, 0.5, 0.9, 1.4, 2.0, 2.2])
    d = Dataset([continuous("a"), continuous("b"), continuous("y")],
                {"a": a, "b": 2 * a, "y": [0.3, 0.1, 0.8, 0.5, 1.9, 0.4]})
    with pytest.raises(CollinearityError):
        fit_gaussian_local(d, "y", ["a", "b"])


def test_gaussian_local_requires_positive_variance():
    with pytest.raises(ArgumentError):
        GaussianLocal("y", (), 0.0, (), 0.0)


def test_fit_network_rejects_mixed_kinds():
    d = Dataset([continuous("x"), discrete("A", ["a", "b"])], {"x": [0.0, 1.0, 2.0], "A": [0, 1, 0]})
    with pytest.raises(ArgumentError):
        fit_network(d, Dag(["x", "A"]))


def test_fit_network_gaussian(marks):
    dag = Dag(marks.names, [("algebra", "analysis"), ("algebra", "statistics"), ("analysis", "statistics")])
    bn = fit_network(marks, dag)
    assert not bn.is_discrete
    assert bn.local("statistics").parents == ("algebra", "analysis")
    assert isinstance(bn.local("mechanics"), GaussianLocal)
    assert np.isfinite(log_likelihood(bn, marks).value)


# =========== Netz und Faktorisierung ===========

def test_network_validation():
    a = cpt("A", (), [[0.5, 0.5]])
    b = cpt("B", ("A",), [[0.9, 0.1], [0.1, 0.9]])
    with pytest.raises(ArgumentError):
        BayesianNetwork(Dag(["A", "B"]), {"A": a, "B": b})
    with pytest.raises(ArgumentError):
        BayesianNetwork(Dag(["A", "B"], [("A", "B")]), {"A": a})
    odd = cpt("B", ("A",), [[0.9, 0.1], [0.1, 0.9]], levels={"A": ("x", "y")})
    with pytest.raises(ArgumentError):
        BayesianNetwork(Dag(["A", "B"], [("A", "B")]), {"A": a, "B": odd})


def test_joint_is_product_of_locals(asia):
    nodes, joint = exact_joint(asia)
    assert joint.sum() == pytest.approx(1.0, abs=1e-12)
    assignment = {v: "no" for v in nodes}
    assignment.update(smoke="yes", bronc="yes", dysp="yes")
    expected = 0.99 * 0.5 * 0.99 * 0.9 * 0.6 * 1.0 * 0.95 * 0.8
    assert joint_probability(asia, assignment) == pytest.approx(expected)


def test_joint_rejects_partial_assignment(asia):
    with pytest.raises(ArgumentError):
        joint_probability(asia, {"asia": "yes"})


def test_fair_coin_log_likelihood():
    bn = network([], [cpt("C", (), [[0.5, 0.5]])])
    d = discrete_dataset({"C": ["yes", "no"] * 5}, {"C": ["yes", "no"]})
    assert log_likelihood(bn, d).value == pytest.approx(10 * math.log(0.5))
    assert row_log_likelihoods(bn, d).shape == (10,)


def test_zero_probability_row_is_flagged():
    bn = network([], [cpt("C", (), [[1.0, 0.0]])])
    d = discrete_dataset({"C": ["yes", "no"]}, {"C": ["yes", "no"]})
    result = log_likelihood(bn, d)
    assert result.zero_probability
    assert result.value == float("-inf")


def test_log_likelihood_does_not_depend_on_row_order(asia):
    d = sample_dataset(asia, 300, seed=4)
    bn = fit_network(d, asia.dag)
    reversed_rows = d.take(list(range(d.n))[::-1])
    assert log_likelihood(bn, d).value == log_likelihood(bn, reversed_rows).value


def test_log_likelihood_checks_levels(asia):
    d = discrete_dataset({"asia": ["yes", "no"]})
    with pytest.raises(ArgumentError):
        log_likelihood(asia, d)


# =========== Zerlegbare Modelle ===========

def _three_variable_data():
    rng = np.random.default_rng(6)
    a = rng.integers(0, 2, 400)
    b = (a + (rng.random(400) < 0.2)) % 2
    c = (b + (rng.random(400) < 0.3)) % 2
    return Dataset([discrete(n, ["0", "1"]) for n in "ABC"], {"A": a, "B": b, "C": c})


def test_clique_factorization_sums_to_one():
    d = _three_variable_data()
    fact = clique_factorization(d, UGraph(["A", "B", "C"], [("A", "B"), ("B", "C")]))
    total = sum(fact.joint(dict(zip("ABC", combo))) for combo in itertools.product("01", repeat=3))
    assert total == pytest.approx(1.0)


def test_clique_factorization_matches_chain_formula():
    d = _three_variable_data()
    fact = clique_factorization(d, UGraph(["A", "B", "C"], [("A", "B"), ("B", "C")]))
    a, b, c = (d.column(n) for n in "ABC")
    p_ab = np.mean((a == 1) & (b == 0))
    p_bc = np.mean((b == 0) & (c == 1))
    p_b = np.mean(b == 0)
    assert fact.joint({"A": "1", "B": "0", "C": "1"}) == pytest.approx(p_ab * p_bc / p_b)


def test_complete_graph_reproduces_empirical_joint():
    d = _three_variable_data()
    fact = clique_factorization(d, UGraph(["A", "B", "C"], [("A", "B"), ("B", "C"), ("A", "C")]))
    rows = np.column_stack([d.column(n) for n in "ABC"])
    expected = np.mean(np.all(rows == [0, 1, 1], axis=1))
    assert fact.joint({"A": "0", "B": "1", "C": "1"}) == pytest.approx(expected)


def test_non_chordal_graph_is_not_decomposable():
    d = Dataset([discrete(n, ["0", "1"]) for n in "ABCD"], {n: [0, 1, 1, 0] for n in "ABCD"})
    g = UGraph(list("ABCD"), [("A", "B"), ("B", "C"), ("C", "D"), ("D", "A")])
    with pytest.raises(DecomposabilityError):
        clique_factorization(d, g)
