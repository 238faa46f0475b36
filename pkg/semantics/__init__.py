from .errors import GroundingError
from .spaces import (
    DiscreteSpace,
    EuclideanSpace,
    FiniteMetricSpace,
    PseudometricSpace,
    validate_pseudometric,
)
from .algebra import (
    IntendedInterpretation,
    SemanticAlgebra,
    TypedGrammar,
    check_homomorphism,
    grammar_from_document,
    homomorphic_extension,
    load_grammar,
    vector_addition_algebra,
)

__all__ = [
    "GroundingError",
    "DiscreteSpace",
    "EuclideanSpace",
    "FiniteMetricSpace",
    "PseudometricSpace",
    "validate_pseudometric",
    "IntendedInterpretation",
    "SemanticAlgebra",
    "TypedGrammar",
    "check_homomorphism",
    "grammar_from_document",
    "homomorphic_extension",
    "load_grammar",
    "vector_addition_algebra",
]
