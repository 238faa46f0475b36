from __future__ import annotations

from typing import Dict, List, Literal, Optional
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .evaluation import ThresholdPolicy
from .gridworld import AgentSpec, TrainConfig, WorldSpec
from .meanings import Meaning
from .profile import GroundingProfile, TypologyVerdict


class HeldoutEntry(BaseModel):
    """Held-out command with its gold meaning (computed from the world when omitted)"""
    model_config = ConfigDict(extra="forbid")

    command: str = Field(..., min_length=1)
    gold: Optional[Meaning] = None


class AuditConfig(BaseModel):
    """Run-level audit document"""
    model_config = ConfigDict(extra="forbid")

    architecture: Literal["gridworld", "gridworld-printed", "symbolic"] = Field(
        ..., description="gridworld weight file | printed grid-world outputs | symbolic rule base"
    )
    weights: Optional[str] = Field(None, description="Weight file for the grid-world agent")
    rules: Optional[str] = Field(None, description="Rule file for the symbolic reference (default rule base when omitted)")
    world: WorldSpec = Field(default_factory=WorldSpec)
    train: TrainConfig = Field(default_factory=TrainConfig, description="Training descriptor and held-out split")

    context: str = "default"
    meaning_type: Literal["ext", "inf", "soc"] = "ext"
    atoms: Optional[List[str]] = Field(None, description="Atoms for preservation error and per-atom robustness")
    items: Optional[List[str]] = Field(None, description="Commands for faithfulness, ACE and composition")
    heldout: Optional[List[HeldoutEntry]] = None
    mechanisms: Optional[List[str]] = Field(None, description="Mechanism set ablated for ACE")

    threat: Optional[str] = Field(None, description="Threat family; the architecture's own when omitted")
    scales: List[float] = Field(default_factory=lambda: [0.0, 0.25, 0.5, 1.0])
    samples_per_scale: int = Field(200, ge=1)
    alpha: float = Field(0.1, ge=0.0, lt=1.0)
    exhaustive: Optional[bool] = Field(None, description="Apply every admissible perturbation (enumerable threats only)")
    tau: float = Field(0.5, ge=0.0)
    success_threshold: Optional[float] = Field(None, ge=0.0)
    aggregator: str = Field("max", pattern=r"^(max|mean|quantile(:[0-9.]+)?)$")
    thresholds: Optional[ThresholdPolicy] = None

    seed: int = 0
    workers: int = Field(1, ge=1)
    output_dir: Optional[str] = None
    format: Literal["report", "csv-tables"] = "report"

    @field_validator("scales")
    @classmethod
    def _scales(cls, v: List[float]) -> List[float]:
        if not v or v[0] != 0.0:
            raise ValueError("scale list must start at 0")
        if any(s < 0 for s in v):
            raise ValueError("scales must be >= 0")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("scales must be strictly ascending")
        return v

    @model_validator(mode="after")
    def _sources(self) -> "AuditConfig":
        if self.architecture == "gridworld" and not self.weights:
            raise ValueError("gridworld audits need a weights file")
        return self


class TrainRunConfig(BaseModel):
    """Run-level training document"""
    model_config = ConfigDict(extra="forbid")

    world: WorldSpec = Field(default_factory=WorldSpec)
    agent: AgentSpec = Field(default_factory=AgentSpec)
    train: TrainConfig = Field(default_factory=TrainConfig)
    output_dir: Optional[str] = None

    def with_seed(self, seed: int) -> "TrainRunConfig":
        return self.model_copy(update={
            "agent": self.agent.model_copy(update={"seed": seed}),
            "train": self.train.model_copy(update={"seed": seed}),
        })


class ProfileReport(BaseModel):
    """Serialized audit result"""
    model_config = ConfigDict(extra="forbid", ser_json_inf_nan="constants")

    toolkit_version: str
    generated_at: str = Field(..., description="UTC timestamp; outside the determinism contract")
    seed: int
    profile: GroundingProfile
    verdict: TypologyVerdict
    config: AuditConfig
    extensions: Dict[str, bool] = Field(default_factory=dict)
