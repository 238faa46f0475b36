import itertools

import pytest

from architectures.tabulated import table_neighbour_threat, tabulated_from_points
from audit.estimators import (
    Aggregator,
    SuccessPredicate,
    composition_deficit,
    estimate_ace,
    faithfulness_error,
    fixed_sampler,
    pooled_curve,
    preservation_error,
    robustness_curve,
    systematicity,
    term_sampler,
)
from environments.gridworld import MODIFIER_INTEGRATION, command_term, gold_meaning, printed_architecture
from schemas.evaluation import EvaluationTuple
from schemas.meanings import VectorMeaning
from semantics.errors import (
    ConfigError,
    EmptyAtomSet,
    EmptyHeldout,
    EmptyInstanceSet,
    LeafTermRejected,
    NegativeScale,
    UnknownMechanism,
)
from utils.rng import StreamFactory


@pytest.fixture
def printed(world):
    return printed_architecture(world)


def _eval(arch) -> EvaluationTuple:
    threat = arch.threat_model()
    return EvaluationTuple(threat_family=threat.family, threat=threat)


def test_aggregators() -> None:
    values = [0.1, 0.4, 0.2, 0.3]
    assert Aggregator.parse("max")(values) == 0.4
    assert Aggregator.parse("mean")(values) == pytest.approx(0.25)
    assert Aggregator.parse("quantile:0.5")(values) == 0.3
    assert str(Aggregator.parse("quantile:0.5")) == "quantile:0.5"


def test_preservation_error_on_printed_outputs(printed, grammar, interp) -> None:
    est = preservation_error(printed, interp, "default", "ext", [grammar.atom("RED"), grammar.atom("NORTH")])
    distances = {r.item: r.distance for r in est.rows}
    assert distances["RED"] == pytest.approx(0.2316, abs=1e-4)
    assert distances["NORTH"] == pytest.approx(0.1497, abs=1e-4)
    assert est.value == pytest.approx(0.2313, abs=5e-3)
    mean = preservation_error(printed, interp, "default", "ext", [grammar.atom("RED"), grammar.atom("NORTH")], "mean")
    assert mean.value == pytest.approx((0.2316 + 0.1497) / 2, abs=1e-4)
    with pytest.raises(EmptyAtomSet):
        preservation_error(printed, interp, "default", "ext", [])


def test_faithfulness_error_on_printed_outputs(printed, grammar, interp) -> None:
    item = command_term(grammar, "RED NORTH")
    est = faithfulness_error(printed, interp, "default", "ext", [item])
    assert est.value == pytest.approx(0.5897, abs=5e-3)
    assert est.rows[0].target == VectorMeaning.of([8.0, 9.0])
    with pytest.raises(EmptyInstanceSet):
        faithfulness_error(printed, interp, "default", "ext", [])


def test_composition_deficit_on_printed_outputs(printed, grammar, interp) -> None:
    item = command_term(grammar, "RED NORTH")
    est = composition_deficit(printed, interp.algebra, "default", "ext", [item])
    assert est.value == pytest.approx(0.2191, abs=5e-3)
    assert est.rows[0].combined.values == pytest.approx((7.844, 9.338))
    with pytest.raises(LeafTermRejected):
        composition_deficit(printed, interp.algebra, "default", "ext", [grammar.leaf("RED")])


def test_systematicity_on_printed_outputs(printed, world, grammar) -> None:
    heldout = [(command_term(grammar, c), gold_meaning(world, command_term(grammar, c))) for c in ("BLUE EAST", "RED WEST")]
    est = systematicity(printed, "default", "ext", heldout, tau=0.5)
    distances = {r.item: r.distance for r in est.rows}
    assert distances["RED WEST"] == pytest.approx(0.682, abs=5e-3)
    assert distances["BLUE EAST"] == pytest.approx(0.442, abs=5e-3)
    assert est.beta == 0.5
    assert systematicity(printed, "default", "ext", heldout, tau=1.0).beta == 1.0
    with pytest.raises(EmptyHeldout):
        systematicity(printed, "default", "ext", [], tau=0.5)
    with pytest.raises(NegativeScale):
        systematicity(printed, "default", "ext", heldout, tau=-1.0)


@pytest.mark.parametrize("order", list(itertools.permutations(["BLUE EAST", "RED NORTH", "RED WEST"])))
def test_systematicity_ignores_order_and_shrinks_with_tau(printed, world, grammar, order) -> None:
    heldout = [(command_term(grammar, c), gold_meaning(world, command_term(grammar, c))) for c in order]
    taus = [1.0, 0.7, 0.6, 0.5, 0.45, 0.3, 0.0]
    betas = [systematicity(printed, "default", "ext", heldout, tau=t).beta for t in taus]
    assert betas == pytest.approx([1.0, 1.0, 2 / 3, 1 / 3, 1 / 3, 0.0, 0.0])
    assert all(a >= b for a, b in zip(betas, betas[1:]))
    est = systematicity(printed, "default", "ext", heldout, tau=0.5)
    assert {r.item for r in est.rows} == set(order)


def test_ace_on_printed_outputs(printed, world, grammar) -> None:
    item = command_term(grammar, "RED NORTH")
    instances = [(item, gold_meaning(world, item))]
    est = estimate_ace(printed, [MODIFIER_INTEGRATION], _eval(printed), instances, SuccessPredicate(threshold=0.5))
    assert est.ace == 0.0
    assert est.rows[0].off_meaning == VectorMeaning.of([7.941, 8.224])
    assert est.ace_continuous == pytest.approx(0.1887, abs=1e-3)
    with pytest.raises(UnknownMechanism):
        estimate_ace(printed, ["attention"], _eval(printed), instances, SuccessPredicate(threshold=0.5))
    with pytest.raises(EmptyInstanceSet):
        estimate_ace(printed, [MODIFIER_INTEGRATION], _eval(printed), [], SuccessPredicate(threshold=0.5))


def test_ace_empty_mechanism_set_is_zero(printed, world, grammar) -> None:
    item = command_term(grammar, "RED NORTH")
    est = estimate_ace(printed, [], _eval(printed), [(item, gold_meaning(world, item))], SuccessPredicate(threshold=5.0))
    assert est.ace == 0.0
    assert est.ace_continuous == 0.0


def test_ablation_leaves_the_architecture_unchanged(printed, grammar) -> None:
    item = command_term(grammar, "RED NORTH")
    before = printed.interpret(item, "default", "ext")
    printed.interpret_under(item, "default", "ext", [MODIFIER_INTEGRATION])
    assert printed.interpret(item, "default", "ext") == before


def _line_architecture():
    # three points on a line, meanings 0, 1, 3
    return tabulated_from_points([[0.0], [1.0], [2.0]], [[0.0], [1.0], [3.0]], ["a", "b", "c"])


def test_robustness_curve_exhaustive_is_exact() -> None:
    arch = _line_architecture()
    threat = table_neighbour_threat(arch.space)
    eval = EvaluationTuple(threat_family=threat.family, threat=threat, alpha=0.0)
    curve = robustness_curve(
        arch, eval, [0.0, 0.5, 1.0, 2.0], 3, StreamFactory(0),
        rep_sampler=fixed_sampler(arch.all_representations()), exhaustive=True,
    )
    assert curve.values == [0.0, 0.0, 2.0, 3.0]
    assert curve.raw_values[0] == 0.0
    assert curve.exhaustive


def test_robustness_curve_is_deterministic_and_parallel_safe() -> None:
    arch = _line_architecture()
    threat = table_neighbour_threat(arch.space)
    eval = EvaluationTuple(threat_family=threat.family, threat=threat)
    sampler = fixed_sampler(arch.all_representations())
    serial = robustness_curve(arch, eval, [0.0, 1.0, 2.0], 20, StreamFactory(5), rep_sampler=sampler)
    again = robustness_curve(arch, eval, [0.0, 1.0, 2.0], 20, StreamFactory(5), rep_sampler=sampler)
    parallel = robustness_curve(arch, eval, [0.0, 1.0, 2.0], 20, StreamFactory(5), rep_sampler=sampler, workers=3)
    assert serial.values == again.values == parallel.values
    assert serial.drifts == parallel.drifts
    assert all(b >= a for a, b in zip(serial.values, serial.values[1:]))


def test_robustness_curve_rejects_bad_grids(printed) -> None:
    eval = _eval(printed)
    sampler = fixed_sampler(printed.all_representations())
    with pytest.raises(NegativeScale):
        robustness_curve(printed, eval, [0.0, -1.0], 1, StreamFactory(0), rep_sampler=sampler)
    with pytest.raises(ConfigError):
        robustness_curve(printed, eval, [0.5, 1.0], 1, StreamFactory(0), rep_sampler=sampler)
    with pytest.raises(ConfigError):
        robustness_curve(printed, eval, [0.0, 1.0], 1, StreamFactory(0), alpha=1.0, rep_sampler=sampler)


def test_pooled_curve_is_pointwise_max(printed) -> None:
    eval = _eval(printed)
    curves = [
        robustness_curve(
            printed, eval, [0.0, 0.5, 1.0], 1, StreamFactory(0),
            rep_sampler=fixed_sampler([rep]), label=rep[0], exhaustive=True,
        )
        for rep in printed.all_representations()
    ]
    pooled = pooled_curve(curves)
    for i in range(3):
        assert pooled.values[i] == max(c.values[i] for c in curves)
    assert pooled.values[1] == 0.0


def test_term_sampler_draws_listed_representations(printed, grammar) -> None:
    terms = [grammar.leaf("RED"), grammar.leaf("NORTH")]
    sampler = term_sampler(printed, terms)
    draws = sampler(StreamFactory(0).stream("test"), 10)
    assert len(draws) == 10
    assert {label for label, _ in draws} <= {"RED", "NORTH"}
