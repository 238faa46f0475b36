from pathlib import Path

import numpy as np
import pytest

from schemas.meanings import VectorMeaning
from schemas.terms import Atom, Constructor, Term
from semantics.algebra import (
    IntendedInterpretation,
    TypedGrammar,
    check_homomorphism,
    homomorphic_extension,
    load_grammar,
    node_deviations,
    vector_addition_algebra,
)
from semantics.errors import ConfigError, SortMismatch, UndefinedAtom, UnknownToken
from semantics.spaces import DiscreteSpace, EuclideanSpace, FiniteMetricSpace, validate_pseudometric

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def test_euclidean_distance_accepts_meanings_and_arrays() -> None:
    space = EuclideanSpace(2)
    assert space.distance(VectorMeaning.of([0, 0]), VectorMeaning.of([3, 4])) == pytest.approx(5.0)
    assert space.distance(np.array([1.0, 1.0]), [1.0, 1.0]) == 0.0
    assert space.contains(VectorMeaning.of([1, 2]))
    assert not space.contains(VectorMeaning.of([1, 2, 3]))
    assert not space.contains([float("nan"), 0.0])


def test_discrete_space() -> None:
    space = DiscreteSpace()
    assert space.distance("a", "a") == 0.0
    assert space.distance("a", "b") == 1.0


def test_finite_space_from_points_is_a_metric() -> None:
    space = FiniteMetricSpace.from_points([[0, 0], [3, 4], [6, 8]], ["a", "b", "c"])
    assert space.size == 3
    assert space.distance(0, 2) == pytest.approx(10.0)
    assert space.index("b") == 1
    assert validate_pseudometric(space).passed


def test_finite_space_rejects_bad_shapes() -> None:
    with pytest.raises(ValueError):
        FiniteMetricSpace(points=["a", "b"], distances=[[0.0]])
    with pytest.raises(ValueError):
        FiniteMetricSpace(points=["a"], distances=[[-1.0]])


@pytest.mark.parametrize(
    "distances, reason",
    [
        ([[0.5, 1.0], [1.0, 0.0]], "zero_diagonal"),
        ([[0.0, 1.0], [2.0, 0.0]], "symmetry"),
        ([[0.0, 1.0, 5.0], [1.0, 0.0, 1.0], [5.0, 1.0, 0.0]], "triangle"),
    ],
)
def test_validate_pseudometric_reports_first_violation(distances, reason) -> None:
    space = FiniteMetricSpace(points=[f"p{i}" for i in range(len(distances))], distances=distances)
    check = validate_pseudometric(space)
    assert not check.passed
    assert check.reason == reason
    assert check.violation is not None


def test_pseudometric_allows_distinct_points_at_zero_distance() -> None:
    space = FiniteMetricSpace(points=["a", "b"], distances=[[0.0, 0.0], [0.0, 0.0]])
    assert validate_pseudometric(space).passed


def test_grammar_builders_check_sorts(grammar) -> None:
    term = grammar.apply("compose", grammar.leaf("RED"), grammar.leaf("NORTH"))
    assert term.surface() == ("RED", "NORTH")
    assert term.depth() == 2
    assert term.sort == "LOCATION"
    with pytest.raises(SortMismatch):
        grammar.apply("compose", grammar.leaf("NORTH"), grammar.leaf("RED"))
    with pytest.raises(UnknownToken):
        grammar.leaf("GREEN")


def test_term_validates_sorts_on_construction() -> None:
    c = Constructor(name="f", arg_sorts=("A",), result_sort="B")
    with pytest.raises(SortMismatch):
        Term.node(c, Term.leaf(Atom(name="x", sort="B")))


def test_subterms_are_post_order_without_duplicates() -> None:
    a = Atom(name="a", sort="S")
    c = Constructor(name="pair", arg_sorts=("S", "S"), result_sort="S")
    leaf = Term.leaf(a)
    term = Term.node(c, leaf, leaf)
    assert term.subterms() == (leaf, term)


def test_enumerate_terms_counts(grammar) -> None:
    terms = grammar.enumerate_terms(2)
    assert len(terms) == 6 + 2 * 4
    assert [t.depth() for t in terms] == sorted(t.depth() for t in terms)
    assert len(grammar.enumerate_terms(2, limit=3)) == 3


def test_random_term_respects_depth(grammar) -> None:
    rng = np.random.default_rng(0)
    for _ in range(20):
        assert grammar.random_term(rng, 2).depth() <= 2


def test_homomorphic_extension_adds_vectors(interp, grammar) -> None:
    term = grammar.apply("compose", grammar.leaf("RED"), grammar.leaf("NORTH"))
    assert homomorphic_extension(interp, term) == VectorMeaning.of([8.0, 9.0])


def test_interpretation_rejects_atoms_outside_domain(grammar) -> None:
    algebra = vector_addition_algebra(grammar, 2)
    interp = IntendedInterpretation(algebra, {"RED": VectorMeaning.of([8, 8])})
    with pytest.raises(UndefinedAtom):
        interp(grammar.atom("BLUE"))
    with pytest.raises(ValueError):
        IntendedInterpretation(algebra, {"GREEN": VectorMeaning.of([0, 0])})


def test_homomorphism_check_is_zero_for_the_extension(interp, grammar) -> None:
    terms = grammar.enumerate_terms(2)
    assert check_homomorphism(lambda t: homomorphic_extension(interp, t), interp.algebra, terms) == 0.0


def test_homomorphism_check_measures_a_shifted_map(interp, grammar) -> None:
    def shifted(term: Term) -> VectorMeaning:
        gold = homomorphic_extension(interp, term).as_array()
        return VectorMeaning.of(gold + (0.0 if term.is_leaf else 1.0))

    terms = grammar.enumerate_terms(2)
    deviations = node_deviations(shifted, interp.algebra, terms)
    assert len(deviations) == 8
    assert check_homomorphism(shifted, interp.algebra, terms) == pytest.approx(np.sqrt(2.0))


def test_load_grammar_document() -> None:
    grammar, interp = load_grammar(CONFIGS / "grammar_gridworld.json")
    assert set(grammar.atoms) == {"RED", "BLUE", "NORTH", "SOUTH", "EAST", "WEST"}
    term = grammar.apply("compose", grammar.leaf("BLUE"), grammar.leaf("EAST"))
    assert homomorphic_extension(interp, term) == VectorMeaning.of([3.0, 2.0])


def test_load_grammar_errors(tmp_path) -> None:
    with pytest.raises(ConfigError):
        load_grammar(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text('{"atoms": [{"name": "A"}]}', encoding="utf-8")
    with pytest.raises(ConfigError):
        load_grammar(bad)


def test_typed_grammar_rejects_duplicates() -> None:
    with pytest.raises(ValueError):
        TypedGrammar([Atom(name="a", sort="S"), Atom(name="a", sort="T")])
