from __future__ import annotations

from typing import Dict, List, Literal, Optional, Tuple
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .meanings import Meaning


class ItemRow(BaseModel):
    """Per-item distance between realized and target meaning"""
    item: str = Field(..., description="Surface form of the item")
    realized: Meaning = Field(..., description="Meaning produced by the architecture")
    target: Meaning = Field(..., description="Gold (or reference) meaning")
    distance: float = Field(..., ge=0.0, description="d_{k,t}(realized, target)")


class ErrorEstimate(BaseModel):
    """Aggregated error with the raw per-item table"""
    value: float = Field(..., ge=0.0)
    aggregator: str = Field(..., description="max | mean | quantile:<q>")
    rows: List[ItemRow] = Field(default_factory=list)


class AceRow(BaseModel):
    """Paired on/off outcome for one instance"""
    item: str
    on_meaning: Meaning
    off_meaning: Meaning
    gold: Meaning
    on_distance: float = Field(..., ge=0.0)
    off_distance: float = Field(..., ge=0.0)
    success_on: int = Field(..., ge=0, le=1)
    success_off: int = Field(..., ge=0, le=1)


class AceEstimate(BaseModel):
    """Ablation-based average causal effect of a mechanism set"""
    mechanisms: List[str]
    ace: float = Field(..., ge=-1.0, le=1.0, description="Mean success(on) - success(off)")
    ace_continuous: float = Field(..., description="Mean distance reduction d_off - d_on")
    success_threshold: float = Field(..., ge=0.0)
    rows: List[AceRow] = Field(default_factory=list)
    extension: bool = Field(True, description="ace_continuous is an extension of the binary definition")


class RobustnessCurve(BaseModel):
    """Empirical modulus: (1-alpha) quantile of drift per scale, monotone envelope applied"""
    model_config = ConfigDict(ser_json_inf_nan="constants")

    label: str = Field("pooled", description="Reference sample the curve was estimated on")
    scales: List[float]
    values: List[float] = Field(..., description="Monotone envelope, value[0] = 0")
    raw_values: List[float] = Field(..., description="Per-scale quantiles before the envelope")
    alpha: float = Field(..., ge=0.0, lt=1.0)
    samples_per_scale: int = Field(..., ge=1)
    exhaustive: bool = Field(False, description="Every admissible perturbation was applied")
    drifts: List[List[float]] = Field(default_factory=list, description="Raw drift samples per scale")

    @model_validator(mode="after")
    def _shape(self) -> "RobustnessCurve":
        if len(self.scales) != len(self.values) or len(self.scales) != len(self.raw_values):
            raise ValueError("scales/values length mismatch")
        return self

    def points(self) -> List[Tuple[float, float]]:
        return list(zip(self.scales, self.values))

    def at(self, scale: float) -> float:
        """Right-continuous step lookup: value at the largest grid scale <= `scale`."""
        value = 0.0
        for s, v in zip(self.scales, self.values):
            if s <= scale:
                value = v
            else:
                break
        return value


class CompositionRow(BaseModel):
    item: str
    actual: Meaning = Field(..., description="Architecture's meaning for the whole term")
    combined: Meaning = Field(..., description="f^M over the architecture's meanings of the parts")
    distance: float = Field(..., ge=0.0)


class CompositionEstimate(BaseModel):
    value: float = Field(..., ge=0.0)
    aggregator: str
    rows: List[CompositionRow] = Field(default_factory=list)


class SystematicityRow(BaseModel):
    item: str
    realized: Meaning
    gold: Meaning
    distance: float = Field(..., ge=0.0)
    within_tolerance: bool


class SystematicityEstimate(BaseModel):
    beta: float = Field(..., ge=0.0, le=1.0)
    tau: float = Field(..., ge=0.0)
    rows: List[SystematicityRow] = Field(default_factory=list)


class EvaluationSummary(BaseModel):
    """Echo of the evaluation tuple a profile was measured under"""
    context: str
    meaning_type: Literal["ext", "inf", "soc"]
    threat_family: str
    reference: str
    test_distribution: Optional[str] = None
    alpha: float = Field(..., ge=0.0, lt=1.0)


class ProfileTables(BaseModel):
    preservation: List[ItemRow] = Field(default_factory=list)
    faithfulness: List[ItemRow] = Field(default_factory=list)
    ace: List[AceRow] = Field(default_factory=list)
    composition: List[CompositionRow] = Field(default_factory=list)
    systematicity: List[SystematicityRow] = Field(default_factory=list)


class GroundingProfile(BaseModel):
    """Measured grounding profile at one evaluation tuple"""
    model_config = ConfigDict(ser_json_inf_nan="constants")

    eps_pres: float = Field(..., ge=0.0)
    eps_faith: float = Field(..., ge=0.0)
    ace: float = Field(..., ge=-1.0, le=1.0)
    ace_continuous: float
    omega_curve: List[Tuple[float, float]] = Field(..., description="(scale, bound) pairs")
    delta_comp: float = Field(..., ge=0.0)
    beta: float = Field(..., ge=0.0, le=1.0)
    g0_level: Literal["weak", "strong"]
    eval: EvaluationSummary
    mechanisms: List[str] = Field(default_factory=list, description="Mechanisms ablated for ACE")
    success_threshold: Optional[float] = Field(None, description="Task success threshold used for ACE")
    tau: Optional[float] = Field(None, description="Systematicity tolerance")
    tables: ProfileTables = Field(default_factory=ProfileTables)
    curves: Dict[str, RobustnessCurve] = Field(default_factory=dict, description="Per-reference-sample curves")
    extensions: Dict[str, bool] = Field(default_factory=lambda: {"ace_continuous": True})
    notes: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _curve(self) -> "GroundingProfile":
        if self.omega_curve:
            if self.omega_curve[0][1] != 0.0:
                raise ValueError("omega_hat(0) must be 0")
            values = [v for _, v in self.omega_curve]
            if any(b < a for a, b in zip(values, values[1:])):
                raise ValueError("omega curve must be nondecreasing")
        return self

    def omega_at(self, scale: float) -> float:
        value = 0.0
        for s, v in self.omega_curve:
            if s <= scale:
                value = v
            else:
                break
        return value


class TypologyVerdict(BaseModel):
    """Cells of the four fourfold tables plus the archetype"""
    cell_g2a_g4: Literal["grounded", "memorizer", "miscalibrated", "lost"]
    cell_g2a_g2b: Literal["competent", "lucky", "effortful failure", "random"]
    cell_g3_g4: Literal["smooth generalist", "robust lookup", "brittle algebraist", "fragile memorizer"]
    cell_g0_g2a: Literal["genuine", "cargo cult", "authentic failure", "broken puppet"]
    archetype: Literal[
        "parrot", "calculator", "glass canon", "fluent empty",
        "brittle expert", "drifter", "grounded", "unclassified",
    ] = "unclassified"
    rationale: Dict[str, bool] = Field(default_factory=dict, description="Per-quantity high/low bits")
