from __future__ import annotations

from typing import Any, Callable, List, Literal, Optional, Tuple
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .profile import EvaluationSummary

# rng, n -> [(label, representation), ...]
RepresentationSampler = Callable[[Any, int], List[Tuple[str, Any]]]


class EvaluationTuple(BaseModel):
    """Context, meaning type, threat model and reference distribution indexing a measurement"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    context: str = Field("default", description="Context k")
    meaning_type: Literal["ext", "inf", "soc"] = Field("ext", description="Meaning type t")
    threat_family: str = Field(..., description="Name of the threat model U")
    reference: str = Field("per-atom", description="Description of the reference distribution P")
    test_distribution: Optional[str] = Field(None, description="Test distribution for correlational checks")
    alpha: float = Field(0.1, ge=0.0, lt=1.0, description="Robustness confidence parameter")

    threat: Optional[Any] = Field(None, exclude=True, description="ThreatModel instance")
    sampler: Optional[Callable[..., Any]] = Field(None, exclude=True, description="RepresentationSampler for P")

    def summary(self) -> EvaluationSummary:
        return EvaluationSummary(
            context=self.context,
            meaning_type=self.meaning_type,
            threat_family=self.threat_family,
            reference=self.reference,
            test_distribution=self.test_distribution,
            alpha=self.alpha,
        )


class ThresholdPolicy(BaseModel):
    """High/low cutoffs for the typology.

    Errors rate "high" when at or below their cutoff; ace and beta rate "high"
    when at or above theirs.
    """

    g1_max_err: float = Field(0.125, ge=0.0)
    g2a_max_err: float = Field(0.5, ge=0.0)
    g2b_min_ace: float = Field(0.1, ge=0.0)
    g2b_min_ace_continuous: float = Field(0.1, ge=0.0)
    g3_ref_scale: float = Field(0.5, ge=0.0)
    g3_max_modulus_at_ref_scale: float = Field(0.5, ge=0.0)
    g4_max_delta: float = Field(0.25, ge=0.0)
    beta_min: float = Field(0.75, ge=0.0, le=1.0)

    @classmethod
    def for_success_threshold(cls, theta: float, ref_scale: float = 0.5) -> "ThresholdPolicy":
        """Defaults scaled to a declared task success threshold."""
        if theta <= 0:
            raise ValueError("success threshold must be > 0")
        return cls(
            g1_max_err=0.25 * theta,
            g2a_max_err=theta,
            g4_max_delta=0.5 * theta,
            g3_ref_scale=ref_scale,
            g3_max_modulus_at_ref_scale=ref_scale,
        )

    @field_validator("g3_ref_scale")
    @classmethod
    def _finite(cls, v: float) -> float:
        if v != v or v == float("inf"):
            raise ValueError("reference scale must be finite")
        return v
