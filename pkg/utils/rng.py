"""
Splittable counter-based random streams.

Every estimator asks for a stream by purpose label; the Philox key is a digest of
(seed, labels), so a stream never depends on how many draws other streams made.
"""

from __future__ import annotations

import hashlib
from typing import Union

import numpy as np

Label = Union[str, int, float]


def derive_key(seed: int, *labels: Label) -> int:
    """128-bit Philox key for (seed, labels)."""
    h = hashlib.blake2b(digest_size=16)
    h.update(f"seed={int(seed)}".encode("utf-8"))
    for label in labels:
        h.update(b"\x1f")
        h.update(repr(label).encode("utf-8"))
    return int.from_bytes(h.digest(), "little")


class StreamFactory:
    """Hands out independent numpy generators keyed by purpose."""

    def __init__(self, seed: int) -> None:
        self.seed = int(seed)

    def stream(self, *labels: Label) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=derive_key(self.seed, *labels)))

    def child(self, *labels: Label) -> "StreamFactory":
        """Factory whose streams are namespaced under `labels`."""
        return StreamFactory(derive_key(self.seed, *labels) & ((1 << 63) - 1))
