"""Exception hierarchy shared by every toolkit module."""

from __future__ import annotations

from typing import Any, Optional


class GroundingError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(GroundingError):
    pass


class UndefinedAtom(GroundingError):
    def __init__(self, atom: str) -> None:
        super().__init__(f"atom {atom!r} is outside the interpretation's domain")
        self.atom = atom


class SortMismatch(GroundingError):
    def __init__(self, constructor: str, expected: Any, got: Any) -> None:
        super().__init__(f"constructor {constructor!r} expects sorts {expected}, got {got}")
        self.constructor = constructor
        self.expected = expected
        self.got = got


class UnknownToken(GroundingError):
    def __init__(self, token: str) -> None:
        super().__init__(f"token {token!r} is not in the architecture's alphabet")
        self.token = token


class UnknownMechanism(GroundingError):
    def __init__(self, mechanism: str, known: Optional[list[str]] = None) -> None:
        msg = f"unknown mechanism {mechanism!r}"
        if known is not None:
            msg += f" (registered: {sorted(known)})"
        super().__init__(msg)
        self.mechanism = mechanism


class EmptyAtomSet(GroundingError):
    pass


class EmptyInstanceSet(GroundingError):
    pass


class EmptyHeldout(GroundingError):
    pass


class EmptySampler(GroundingError):
    pass


class NegativeScale(GroundingError):
    def __init__(self, scale: float) -> None:
        super().__init__(f"perturbation scale must be >= 0, got {scale}")
        self.scale = scale


class LeafTermRejected(GroundingError):
    def __init__(self, term: str) -> None:
        super().__init__(f"composition deficit needs composite terms, got leaf {term!r}")
        self.term = term


class GridTooCoarse(GroundingError):
    def __init__(self, distance: float, grid_max: float) -> None:
        super().__init__(f"pairwise distance {distance} exceeds grid coverage {grid_max}")
        self.distance = distance
        self.grid_max = grid_max


class InconsistentClosure(GroundingError):
    def __init__(self, literal: str) -> None:
        super().__init__(f"closure derives both {literal!r} and its negation")
        self.literal = literal


class MalformedCommand(GroundingError):
    pass


class DivergedTraining(GroundingError):
    def __init__(self, episode: int, loss: float) -> None:
        super().__init__(f"training diverged at episode {episode} (mean loss {loss:.4g})")
        self.episode = episode
        self.loss = loss
