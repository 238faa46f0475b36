import math

import numpy as np
import pytest

from audit_pipeline import check_discrete_step_moduli, random_finite_space, random_valid_modulus
from audit.modulus import (
    ModulusCurve,
    check_minimality,
    domain_diameter,
    evaluate,
    image_diameter,
    is_valid_modulus,
    lipschitz_candidate,
    local_moduli,
    minimal_oscillation,
    pairwise_grid,
    reciprocal_counterexample,
    uniform_discreteness,
    vanishing_limit_check,
)
from connectors.report_output import to_json
from semantics.errors import ConfigError, GridTooCoarse
from semantics.spaces import FiniteMetricSpace
from utils.rng import StreamFactory


def test_evaluate_is_right_continuous() -> None:
    curve = ModulusCurve(grid=[0.0, 1.0, 2.0], values=[0.0, 0.5, 3.0])
    assert evaluate(curve, 0.0) == 0.0
    assert evaluate(curve, 0.99) == 0.0
    assert evaluate(curve, 1.0) == 0.5
    assert evaluate(curve, 10.0) == 3.0
    with pytest.raises(ValueError):
        evaluate(curve, -0.1)


def test_modulus_curve_shape_checks() -> None:
    with pytest.raises(ValueError):
        ModulusCurve(grid=[0.5, 1.0], values=[0.0, 1.0])
    with pytest.raises(ValueError):
        ModulusCurve(grid=[0.0, 0.0], values=[0.0, 1.0])


def test_minimal_oscillation_on_a_line() -> None:
    space = FiniteMetricSpace.from_points([[0.0], [1.0], [3.0]])
    S = [[0.0], [2.0], [2.5]]
    curve = minimal_oscillation(space, S)
    assert curve.grid == [0.0, 1.0, 2.0, 3.0]
    assert curve.values == pytest.approx([0.0, 2.0, 2.0, 2.5])
    assert pairwise_grid(space, extra=[0.5]) == [0.0, 0.5, 1.0, 2.0, 3.0]


def test_minimal_oscillation_checks_table_size() -> None:
    space = FiniteMetricSpace.discrete(3)
    with pytest.raises(ConfigError):
        minimal_oscillation(space, [[0.0]])
    with pytest.raises(ConfigError):
        minimal_oscillation(space, [[0.0], [1.0], [2.0]], grid=[0.5, 1.0])


def test_random_spaces_satisfy_the_modulus_properties() -> None:
    streams = StreamFactory(0)
    for trial in range(100):
        rng = streams.stream("space", trial)
        space, S = random_finite_space(rng)
        assert space.size <= 12
        exact = minimal_oscillation(space, S)
        assert exact.is_monotone
        assert exact.values[0] == 0.0
        assert is_valid_modulus(exact, S, space).passed
        candidate = random_valid_modulus(exact, rng)
        assert is_valid_modulus(candidate, S, space).passed
        assert check_minimality(space, S, candidate).passed


def test_is_valid_modulus_reports_failures() -> None:
    space = FiniteMetricSpace.from_points([[0.0], [1.0]])
    S = [[0.0], [5.0]]
    too_low = ModulusCurve(grid=[0.0, 1.0], values=[0.0, 1.0])
    check = is_valid_modulus(too_low, S, space)
    assert not check.passed
    assert check.reason == "domination"
    assert check.witness == (0, 1)
    assert check.gap == pytest.approx(4.0)
    assert is_valid_modulus(ModulusCurve(grid=[0.0, 1.0], values=[0.0 + 1.0, 5.0]), S, space).reason == "nonzero_at_zero"
    assert is_valid_modulus(ModulusCurve(grid=[0.0, 1.0, 2.0], values=[0.0, 6.0, 5.0]), S, space).reason == "not_monotone"
    with pytest.raises(GridTooCoarse):
        is_valid_modulus(ModulusCurve(grid=[0.0, 0.5], values=[0.0, 9.0]), S, space)


def test_check_minimality_rejects_a_smaller_candidate() -> None:
    space = FiniteMetricSpace.from_points([[0.0], [1.0]])
    S = [[0.0], [5.0]]
    assert not check_minimality(space, S, ModulusCurve(grid=[0.0, 1.0], values=[0.0, 4.0])).passed


@pytest.mark.parametrize("n", [2, 5, 12])
def test_discrete_spaces_have_step_moduli(n) -> None:
    rng = np.random.default_rng(n)
    space = FiniteMetricSpace.discrete(n)
    S = rng.normal(size=(n, 3)).tolist()
    grid = [0.0, 0.25, 0.5, 0.999, 1.0, 1.5]
    curve = minimal_oscillation(space, S, grid)
    diam = image_diameter(S)
    assert curve.values == [0.0, 0.0, 0.0, 0.0, diam, diam]
    assert uniform_discreteness(space) == 1.0
    lipschitz = lipschitz_candidate(space, S, pairwise_grid(space, grid))
    assert is_valid_modulus(lipschitz, S, space).passed


def test_discrete_step_moduli_suite_finds_no_failures() -> None:
    assert check_discrete_step_moduli(StreamFactory(1), 10) == []


def test_uniform_discreteness_edge_cases() -> None:
    assert uniform_discreteness(FiniteMetricSpace.discrete(1)) is None
    collapsed = FiniteMetricSpace(points=["a", "b"], distances=[[0.0, 0.0], [0.0, 0.0]])
    assert uniform_discreteness(collapsed) is None
    lipschitz = lipschitz_candidate(collapsed, [[0.0], [1.0]], [0.0, 1.0])
    assert lipschitz.values == [0.0, math.inf]
    assert '"Infinity"' not in to_json(lipschitz)
    assert "Infinity" in to_json(lipschitz)


def test_diameters() -> None:
    space = FiniteMetricSpace.from_points([[0.0, 0.0], [3.0, 4.0]])
    assert domain_diameter(space) == pytest.approx(5.0)
    assert image_diameter([[1.0]]) == 0.0


def test_local_moduli_restrict_to_regions() -> None:
    space = FiniteMetricSpace.from_points([[0.0], [1.0], [2.0], [3.0]])
    S = [[0.0], [0.0], [5.0], [5.0]]
    local = local_moduli(space, S, {"left": [0, 1], "right": [2, 3]})
    assert local["left"].values == [0.0] * len(local["left"].grid)
    assert max(minimal_oscillation(space, S).values) == 5.0


def test_reciprocal_counterexample_is_detected() -> None:
    space, S = reciprocal_counterexample(50)
    assert space.size == 51
    curve = minimal_oscillation(space, S)
    check_scales = [1.0 / m for m in range(1, 51)]
    for p in check_scales:
        assert curve.at(p) == 1.0
    check = vanishing_limit_check(curve, check_scales, image_diameter(S))
    assert not check.passed
    assert check.threshold == 0.5


def test_vanishing_limit_passes_for_a_continuous_map() -> None:
    space = FiniteMetricSpace.from_points([[i / 10] for i in range(11)])
    S = [[i / 10] for i in range(11)]
    curve = minimal_oscillation(space, S)
    assert vanishing_limit_check(curve, [0.5, 0.2, 0.1]).passed


def test_vanishing_limit_rejects_bad_check_scales() -> None:
    curve = ModulusCurve(grid=[0.0, 1.0], values=[0.0, 1.0])
    with pytest.raises(ConfigError):
        vanishing_limit_check(curve, [0.1, 0.5])
    with pytest.raises(ConfigError):
        vanishing_limit_check(curve, [0.0])
