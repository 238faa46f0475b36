from .terms import Atom, Constructor, Term
from .meanings import BOTTOM, BottomMeaning, LabelMeaning, Meaning, RoleMeaning, VectorMeaning
from .profile import (
    AceEstimate,
    CompositionEstimate,
    ErrorEstimate,
    GroundingProfile,
    RobustnessCurve,
    SystematicityEstimate,
    TypologyVerdict,
)
from .evaluation import EvaluationTuple, ThresholdPolicy
from .documents import GrammarDocument, RuleBaseDocument, WeightFile
from .gridworld import AgentSpec, TrainConfig, TrainLog, WorldSpec
from .config import AuditConfig, HeldoutEntry, ProfileReport, TrainRunConfig

__all__ = [
    "Atom",
    "Constructor",
    "Term",
    "BOTTOM",
    "BottomMeaning",
    "LabelMeaning",
    "Meaning",
    "RoleMeaning",
    "VectorMeaning",
    "AceEstimate",
    "CompositionEstimate",
    "ErrorEstimate",
    "GroundingProfile",
    "RobustnessCurve",
    "SystematicityEstimate",
    "TypologyVerdict",
    "EvaluationTuple",
    "ThresholdPolicy",
    "GrammarDocument",
    "RuleBaseDocument",
    "WeightFile",
    "AgentSpec",
    "TrainConfig",
    "TrainLog",
    "WorldSpec",
    "AuditConfig",
    "HeldoutEntry",
    "ProfileReport",
    "TrainRunConfig",
]
