from .grid_agent import GridAgent
from .reinforce import gradient_check, train, training_commands

__all__ = [
    "GridAgent",
    "gradient_check",
    "train",
    "training_commands",
]
