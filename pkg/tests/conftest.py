from typing import Dict

import pytest

from architectures.symbolic import build_symbolic_architecture
from environments.gridworld import grid_grammar, intended_interpretation
from models.grid_agent import GridAgent
from schemas.evaluation import EvaluationTuple
from schemas.gridworld import AgentSpec, WorldSpec
from schemas.profile import GroundingProfile


@pytest.fixture
def world() -> WorldSpec:
    return WorldSpec()


@pytest.fixture
def grammar(world):
    return grid_grammar(world)


@pytest.fixture
def interp(world, grammar):
    return intended_interpretation(world, grammar)


@pytest.fixture
def agent(world) -> GridAgent:
    return GridAgent.initialize(world.vocab, AgentSpec(seed=7))


@pytest.fixture
def small_agent(world) -> GridAgent:
    return GridAgent.initialize(world.vocab, AgentSpec(embed_dim=3, hidden_dim=5, seed=3))


@pytest.fixture
def symbolic():
    return build_symbolic_architecture()


def make_profile(**overrides) -> GroundingProfile:
    """Profile with the printed grid-world numbers unless overridden."""
    fields: Dict = dict(
        eps_pres=0.2313,
        eps_faith=0.5897,
        ace=0.0,
        ace_continuous=0.1886,
        omega_curve=[(0.0, 0.0), (0.25, 0.09), (0.5, 0.176), (1.0, 0.35)],
        delta_comp=0.2191,
        beta=0.5,
        g0_level="strong",
        eval=EvaluationTuple(threat_family="gaussian_norm").summary(),
    )
    fields.update(overrides)
    return GroundingProfile(**fields)
