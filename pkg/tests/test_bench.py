import math

import numpy as np
import pytest

from gpdiff import bench
from gpdiff.bench import baseline, delta_f, delta_x, lift, validate
from gpdiff.expr import Domain, evaluate, evaluate_batch, parse, random_tree
from gpdiff.optim import preset

DOM = Domain()


# -- lift ---------------------------------------------------------------------

def test_lift_examples():
    assert lift(parse("(add x0 x1)"), 10).evaluate(np.ones(10)) == 2
    assert lift(parse("(mul x0 x1)"), 3).evaluate([1, 2, 3]) == 4


def test_lift_two_is_identity():
    rng = np.random.default_rng(0)
    for _ in range(100):
        t = random_tree(rng)
        x = rng.uniform(-5, 5, 2)
        a, b = lift(t, 2).evaluate(x), evaluate(t, x)
        assert a == b or (math.isnan(a) and math.isnan(b)) or abs(a - b) <= 1e-12


def test_lift_matches_explicit_chain_sum():
    rng = np.random.default_rng(1)
    t = parse("(sub (sin x0) (mul x1 x1))")
    X = rng.uniform(-5, 5, (30, 6))
    expected = np.mean([[evaluate(t, (x[i], x[i + 1])) for i in range(5)] for x in X], axis=1)
    np.testing.assert_allclose(lift(t, 6)(X), expected, rtol=0, atol=1e-12)


@pytest.mark.parametrize("D", [2, 3, 10])
def test_lift_constant(D):
    X = np.random.default_rng(D).uniform(-5, 5, (5, D))
    np.testing.assert_array_equal(lift(parse("-3"), D)(X), -3.0)


def test_lift_errors():
    with pytest.raises(ValueError):
        lift(parse("(add x0 x2)"), 10)
    with pytest.raises(ValueError):
        lift(parse("x0"), 1)


def test_lifted_str_is_base_expression():
    assert str(lift(parse("(add x0 x1)"), 4)) == "(add x0 x1)"


# -- delta_x / delta_f --------------------------------------------------------

def test_delta_x_examples():
    assert delta_x([[1.0, 2.0]], [[1.0, 2.0]], DOM) == 0
    assert delta_x([[-5.0]], [[5.0]], Domain(dimension=1)) == 1
    assert delta_x([[0.0, 0.0]], [[10.0, 0.0]], DOM) == pytest.approx(1 / math.sqrt(2), abs=1e-12)


def test_delta_f_examples():
    assert delta_f([3.0, 3.0], [3.0]) == 0
    assert delta_f([0.0], [1.0]) == 1
    assert delta_f([0.0, 1.0], [0.0, 1.0]) == 0.5


def test_deltas_in_unit_interval():
    rng = np.random.default_rng(2)
    for _ in range(100):
        D = int(rng.integers(1, 11))
        dom = Domain(dimension=D)
        A = rng.uniform(-5, 5, (rng.integers(1, 8), D))
        B = rng.uniform(-5, 5, (rng.integers(1, 8), D))
        assert 0 <= delta_x(A, B, dom) <= 1
        fa, fb = rng.normal(size=len(A)), rng.normal(size=len(B))
        assert 0 <= delta_f(fa, fb) <= 1


# -- validate -----------------------------------------------------------------

def test_identical_configs_give_identical_best_sets():
    de = preset("de-f05", budget=200)
    dom = Domain(dimension=4)
    rep = validate(baseline("rastrigin"), de, de, dom, repetitions=3)
    assert len(rep.A) == len(rep.B) == 3
    for (a, fa), (b, fb) in zip(rep.A, rep.B):
        np.testing.assert_array_equal(a, b)
        assert fa == fb
    # the all-pairs mean of a set against itself is its own spread, zero
    # only when every repetition ends at the same point
    assert rep.delta_x == delta_x([a for a, _ in rep.A], [a for a, _ in rep.A], dom)
    one = validate(baseline("rastrigin"), de, de, dom, repetitions=1)
    assert one.delta_x == 0 and one.delta_f == 0


def test_single_repetition():
    dom = Domain(dimension=3)
    rep = validate(baseline("sphere"), preset("de-f05"), preset("de-f03"), dom, repetitions=1)
    (a, _), (b, _) = rep.A[0], rep.B[0]
    assert rep.delta_x == pytest.approx(np.linalg.norm(a - b) / (math.sqrt(3) * 10), abs=1e-15)


def test_budget_override_and_report():
    rep = validate(lift(parse("(add x0 x1)"), 5), preset("de-f05"), preset("de-f03"),
                   Domain(dimension=5), repetitions=2, budget=60)
    d = rep.to_dict()
    assert d["budget"] == 60 and d["dimension"] == 5 and d["function"] == "(add x0 x1)"
    assert len(d["A"]) == 2 and len(d["A"][0]["x"]) == 5


def test_independent_initialisation_per_optimizer():
    # different configs draw different initial populations, so even the
    # first evaluated points differ
    dom = Domain(dimension=3)
    rep = validate(baseline("sphere"), preset("de-f05", budget=20), preset("de-f03", budget=20),
                   dom, repetitions=1)
    assert not np.array_equal(rep.A[0][0], rep.B[0][0])


def test_sphere_10d_de_pair_converges_close():
    dom = Domain(dimension=10)
    rep = validate(baseline("sphere"), preset("de-f05"), preset("de-f03"), dom,
                   repetitions=21, budget=10000)
    assert rep.delta_x < 0.1


# -- baselines ----------------------------------------------------------------

@pytest.mark.parametrize("name", ["sphere", "rastrigin", "ackley", "griewank"])
def test_baselines_zero_at_origin(name):
    assert abs(baseline(name)(np.zeros((1, 10)))[0]) <= 1e-12


def test_rosenbrock_zero_at_ones():
    assert bench.rosenbrock(np.ones((1, 6)))[0] == 0


def test_unknown_baseline():
    with pytest.raises(KeyError):
        baseline("schwefel")


def test_sphere_baseline_matches_expression():
    X = np.random.default_rng(0).uniform(-5, 5, (20, 2))
    np.testing.assert_allclose(baseline("sphere")(X),
                               evaluate_batch(parse("(add (mul x0 x0) (mul x1 x1))"), X))
