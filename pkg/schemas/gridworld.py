from __future__ import annotations

import math
from typing import Dict, List, Tuple
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class WorldSpec(BaseModel):
    """Continuous planar world with colour landmarks and unit direction vectors"""
    model_config = ConfigDict(extra="forbid")

    bounds: Tuple[float, float] = Field((10.0, 10.0), description="World extent [0,w] x [0,h]")
    landmarks: Dict[str, Tuple[float, float]] = Field(
        default_factory=lambda: {"RED": (8.0, 8.0), "BLUE": (2.0, 2.0)},
        description="COLOR atom -> coordinate",
    )
    directions: Dict[str, Tuple[float, float]] = Field(
        default_factory=lambda: {
            "NORTH": (0.0, 1.0),
            "SOUTH": (0.0, -1.0),
            "EAST": (1.0, 0.0),
            "WEST": (-1.0, 0.0),
        },
        description="DIRECTION atom -> unit vector",
    )
    success_threshold: float = Field(0.5, gt=0.0, description="Task success distance")

    @model_validator(mode="after")
    def _geometry(self) -> "WorldSpec":
        w, h = self.bounds
        for name, (x, y) in self.landmarks.items():
            if not (0.0 <= x <= w and 0.0 <= y <= h):
                raise ValueError(f"landmark {name} at ({x}, {y}) is outside the world bounds")
        for name, (dx, dy) in self.directions.items():
            if abs(math.hypot(dx, dy) - 1.0) > 1e-12:
                raise ValueError(f"direction {name} is not a unit vector")
        if set(self.landmarks) & set(self.directions):
            raise ValueError("colour and direction atoms must be disjoint")
        return self

    @property
    def vocab(self) -> List[str]:
        return list(self.landmarks) + list(self.directions)


class AgentSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    embed_dim: int = Field(16, ge=1)
    hidden_dim: int = Field(64, ge=1)
    seed: int = Field(0, description="Parameter initialisation seed")


class TrainConfig(BaseModel):
    """REINFORCE hyperparameters"""
    model_config = ConfigDict(extra="forbid")

    episodes: int = Field(3000, ge=0)
    learning_rate: float = Field(3e-3, gt=0.0)
    lr_final_fraction: float = Field(0.1, gt=0.0, le=1.0, description="Linear decay target as a fraction of the initial rate")
    sigma: float = Field(0.3, gt=0.0, description="Std of the Gaussian coordinate policy")
    baseline_decay: float = Field(0.99, ge=0.0, lt=1.0)
    samples_per_command: int = Field(16, ge=1)
    antithetic: bool = Field(True, description="Draw policy noise in +/- pairs")
    grad_clip: float = Field(5.0, gt=0.0)
    heldout: List[str] = Field(default_factory=lambda: ["BLUE EAST", "RED WEST"])
    train_atoms: bool = Field(True, description="Include single-atom commands in training")
    log_every: int = Field(100, ge=1)
    divergence_loss: float = Field(1e3, gt=0.0)
    seed: int = 0

    @field_validator("heldout")
    @classmethod
    def _two_tokens(cls, v: List[str]) -> List[str]:
        for cmd in v:
            if len(cmd.split()) != 2:
                raise ValueError(f"held-out command {cmd!r} must be COLOR DIRECTION")
        return v

    def descriptor(self) -> str:
        return (
            f"REINFORCE, Gaussian coordinate policy sigma={self.sigma}, {self.episodes} episodes, "
            f"lr={self.learning_rate}, seed={self.seed}, held out {self.heldout}"
        )


class TrainLogRow(BaseModel):
    episode: int = Field(..., ge=0)
    loss: float = Field(..., description="Mean deterministic distance over training commands")


class TrainLog(BaseModel):
    rows: List[TrainLogRow] = Field(default_factory=list)

    @model_validator(mode="after")
    def _increasing(self) -> "TrainLog":
        episodes = [r.episode for r in self.rows]
        if any(b <= a for a, b in zip(episodes, episodes[1:])):
            raise ValueError("training log episodes must be strictly increasing")
        return self

    def append(self, episode: int, loss: float) -> None:
        if self.rows and episode <= self.rows[-1].episode:
            raise ValueError("training log episodes must be strictly increasing")
        self.rows.append(TrainLogRow(episode=episode, loss=loss))

    @property
    def final_loss(self) -> float:
        return self.rows[-1].loss if self.rows else math.nan
