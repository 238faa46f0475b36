from .gridworld import (
    MODIFIER_INTEGRATION,
    GridArchitecture,
    audit_trained_agent,
    audit_printed_coordinates,
    build_architecture,
    gaussian_norm_perturbation,
    gold_meaning,
    grid_grammar,
)

__all__ = [
    "MODIFIER_INTEGRATION",
    "GridArchitecture",
    "audit_trained_agent",
    "audit_printed_coordinates",
    "build_architecture",
    "gaussian_norm_perturbation",
    "gold_meaning",
    "grid_grammar",
]
