import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import SQRT3_4, linear_problem
from mosd.errors import DomainError, InvalidInputError
from mosd.problems import (
    REGISTRY,
    Region,
    check_gradients,
    estimate_region_constants,
    evaluate,
    get_problem,
    jacobian,
    load_problem,
    problem_from_descriptor,
)


@pytest.mark.parametrize(
    "x, expected",
    [
        ((0.0, 0.0), (0.0, 0.0)),
        ((1.0, 0.0), (0.5, 1.0)),
        ((0.75, SQRT3_4), (3 / 8, 3 / 4)),
    ],
)
def test_evaluate_counterexample(cex, x, expected):
    np.testing.assert_allclose(evaluate(cex, x), expected, rtol=0, atol=1e-15)


@pytest.mark.parametrize(
    "x, rows",
    [
        ((0.0, 0.0), [(0, 0), (1, 0)]),
        ((1.0, SQRT3_4), [(1, SQRT3_4), (1, 0)]),
        ((0.3, -0.7), [(0.3, -0.7), (1, 0)]),
    ],
)
def test_jacobian_counterexample(cex, x, rows):
    G = jacobian(cex, x)
    assert G.shape == (2, 2)
    np.testing.assert_array_equal(G, np.array(rows, dtype=float))


def test_counterexample_matches_formulas(cex, rng):
    for x in Region.ball([0, 0], 50).sample(rng, 200):
        r, s = x
        f = evaluate(cex, x)
        assert f[0] - (r * r + s * s) / 2 == pytest.approx(0, abs=1e-12)
        assert f[1] - r == 0


def test_dimension_and_domain_errors(cex):
    with pytest.raises(InvalidInputError):
        evaluate(cex, [1.0, 2.0, 3.0])
    with pytest.raises(InvalidInputError):
        jacobian(cex, [np.nan, 0.0])
    with pytest.raises(DomainError):
        evaluate(cex, [2e3, 0.0])
    with pytest.raises(DomainError):
        jacobian(cex, [0.0, -1e4])


def test_evaluation_is_deterministic(rosen, rng):
    x = rng.uniform(-2, 2, size=2)
    a, b = jacobian(rosen, x), jacobian(rosen, x.copy())
    assert a.tobytes() == b.tobytes()
    assert evaluate(rosen, x).tobytes() == evaluate(rosen, x.copy()).tobytes()


def test_check_gradients_counterexample(cex):
    assert check_gradients(cex, [0.3, -0.7], h=1e-6) <= 1e-6


def test_check_gradients_linear():
    p = linear_problem([2.0, -1.0, 0.5])
    for x in ([0, 0, 0], [1, 2, 3], [-4.5, 0.1, 9]):
        assert check_gradients(p, x) <= 1e-6


def test_check_gradients_flags_wrong_gradient():
    p = linear_problem([2.0, -1.0], wrong=0.1)
    assert check_gradients(p, [0.5, 0.5]) > 1e-2


def test_check_gradients_stencil_outside_domain():
    p = linear_problem([1.0, 1.0])
    with pytest.raises(DomainError):
        check_gradients(p, [10.0, 0.0], h=1e-3)


@pytest.mark.parametrize("name", list(REGISTRY))
def test_registry_gradients(name):
    p = REGISTRY[name]
    pts = Region.ball(np.zeros(p.n), 2.0).sample(np.random.default_rng(7), 100)
    assert max(check_gradients(p, x) for x in pts) <= 1e-5


def test_region_constants_counterexample_large_ball(cex):
    c = estimate_region_constants(cex, Region.ball([0, 0], 2), k=10000, seed=1)
    assert c.L == pytest.approx(1.0, abs=0.05)
    assert c.M == pytest.approx(2.0, abs=0.05)
    assert c.samples == 10000


def test_region_constants_counterexample_small_ball(cex):
    c = estimate_region_constants(cex, Region.ball([1, 0], 0.1), k=10000, seed=2)
    assert c.M == pytest.approx(1.1, abs=0.01)


def test_region_constants_linear():
    c = np.array([3.0, -4.0])
    est = estimate_region_constants(linear_problem(c), Region.box([-1, -1], [1, 1]), k=50, seed=0)
    assert est.L == 0.0
    assert est.M == pytest.approx(np.linalg.norm(c), rel=1e-15)


def test_region_constants_deterministic(rosen):
    region = Region.box([-1, -1], [1, 1])
    assert estimate_region_constants(rosen, region, 300, seed=5) == estimate_region_constants(
        rosen, region, 300, seed=5
    )


@pytest.mark.parametrize("kind", ["ball", "box"])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_region_constants_monotone_under_nesting(rosen, kind, seed):
    region = Region.ball([0, 0], 1.5) if kind == "ball" else Region.box([-1, -0.5], [1, 2])
    prev = None
    for k in (10, 100, 1000):
        est = estimate_region_constants(rosen, region, k, seed=seed)
        if prev is not None:
            assert est.L >= prev.L and est.M >= prev.M
        prev = est


def test_region_constants_needs_two_samples(cex):
    with pytest.raises(InvalidInputError):
        estimate_region_constants(cex, Region.ball([0, 0], 1), k=1)


def test_region_validation():
    with pytest.raises(InvalidInputError):
        Region.box([0, 0], [1, 0])
    with pytest.raises(InvalidInputError):
        Region.ball([0, 0], 0.0)
    with pytest.raises(InvalidInputError):
        Region.from_dict({"kind": "simplex"})


@given(st.integers(1, 4), st.integers(0, 2**31))
@settings(max_examples=30, deadline=None)
def test_ball_samples_stay_inside(n, seed):
    region = Region.ball(np.arange(n, dtype=float), 0.5)
    pts = region.sample(np.random.default_rng(seed), 50)
    assert all(region.contains(p) for p in pts)


def test_ball_sampling_is_uniform_in_radius():
    # uniform in the 2-ball: P(|x| <= r) = r^2
    pts = Region.ball([0, 0], 1).sample(np.random.default_rng(3), 20000)
    frac = np.mean(np.linalg.norm(pts, axis=1) <= 0.5)
    assert frac == pytest.approx(0.25, abs=0.015)


def test_descriptor_round_trip(tmp_path, rosen, rng):
    path = tmp_path / "r.json"
    path.write_text(json.dumps(rosen.descriptor))
    again = load_problem(path)
    for x in rng.uniform(-2, 2, size=(10, 2)):
        assert jacobian(again, x).tobytes() == jacobian(rosen, x).tobytes()


def test_descriptor_rational_coefficients():
    p = problem_from_descriptor(
        {
            "name": "cubic",
            "n": 2,
            "objectives": [{"terms": [{"coeff": "1/3", "exponents": [3, 0]}, {"coeff": -2, "exponents": [1, 1]}]}],
            "domain": {"kind": "ball", "center": [0, 0], "radius": 5},
        }
    )
    x = np.array([1.5, -2.0])
    assert evaluate(p, x)[0] == pytest.approx(1.5**3 / 3 + 2 * 1.5 * 2.0)
    np.testing.assert_allclose(jacobian(p, x)[0], [1.5**2 + 4.0, -3.0])


@pytest.mark.parametrize(
    "bad",
    [
        {"n": 2, "objectives": [], "domain": {"kind": "ball", "center": [0, 0], "radius": 1}},
        {"name": "x", "n": 2, "objectives": [], "domain": {"kind": "ball", "center": [0, 0], "radius": 1}},
        {"name": "x", "n": 2, "objectives": [{"terms": [{"coeff": 1, "exponents": [1]}]}],
         "domain": {"kind": "ball", "center": [0, 0], "radius": 1}},
        {"name": "x", "n": 2, "objectives": [{"terms": [{"coeff": 1, "exponents": [1, -1]}]}],
         "domain": {"kind": "ball", "center": [0, 0], "radius": 1}},
        {"name": "x", "n": 2, "objectives": [{"terms": [{"coeff": 1, "exponents": [1.5, 0]}]}],
         "domain": {"kind": "ball", "center": [0, 0], "radius": 1}},
        {"name": "x", "n": 2, "objectives": [{"terms": [{"coeff": 1, "exponents": [1, 0]}]}],
         "domain": {"kind": "box", "lower": [0, 0], "upper": [0, 1]}},
    ],
)
def test_descriptor_validation(bad):
    with pytest.raises(InvalidInputError):
        problem_from_descriptor(bad)


def test_get_problem_unknown():
    with pytest.raises(InvalidInputError):
        get_problem("no-such-problem")


def test_registry_analytic_constants(cex):
    c = cex.constants(Region.ball([0, 0], 2))
    assert (c.L, c.M, c.source) == (1.0, 2.0, "analytic")
    assert c.holder_constant() == 2.0
    assert cex.constants(Region.ball([0, 0], 0.5)).M == 1.0
    assert math.isclose(cex.constants(Region.ball([1, 0], 0.1)).M, 1.1)
