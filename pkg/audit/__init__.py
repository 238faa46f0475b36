from .estimators import (
    Aggregator,
    SuccessPredicate,
    composition_deficit,
    estimate_ace,
    faithfulness_error,
    preservation_error,
    robustness_curve,
    systematicity,
)
from .profile import grounding_profile
from .modulus import (
    ModulusCurve,
    is_valid_modulus,
    minimal_oscillation,
    vanishing_limit_check,
)
from .typology import classify, classify_archetype, classify_cells

__all__ = [
    "Aggregator",
    "SuccessPredicate",
    "composition_deficit",
    "estimate_ace",
    "faithfulness_error",
    "preservation_error",
    "robustness_curve",
    "systematicity",
    "grounding_profile",
    "ModulusCurve",
    "is_valid_modulus",
    "minimal_oscillation",
    "vanishing_limit_check",
    "classify",
    "classify_archetype",
    "classify_cells",
]
