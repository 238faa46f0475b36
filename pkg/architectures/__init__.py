from .base import (
    GroundingArchitecture,
    Locus,
    Mechanism,
    Perturbation,
    ProvenanceRecord,
    ScopedArchitecture,
    ThreatModel,
    identity_perturbation,
)
from .tabulated import TabulatedArchitecture, table_neighbour_threat, tabulated_from_points
from .symbolic import (
    RuleBase,
    SymbolicArchitecture,
    build_symbolic_architecture,
    closure,
    compose_roles,
    default_rule_base,
    edit_perturbation,
    load_rule_base,
    role_distance,
)

__all__ = [
    "GroundingArchitecture",
    "Locus",
    "Mechanism",
    "Perturbation",
    "ProvenanceRecord",
    "ScopedArchitecture",
    "ThreatModel",
    "identity_perturbation",
    "TabulatedArchitecture",
    "table_neighbour_threat",
    "tabulated_from_points",
    "RuleBase",
    "SymbolicArchitecture",
    "build_symbolic_architecture",
    "closure",
    "compose_roles",
    "default_rule_base",
    "edit_perturbation",
    "load_rule_base",
    "role_distance",
]
