"""
Grid-world agent: token embedding, gated recurrent encoder, linear decoder.

Shapes are row-major over a batch: inputs (B, T) token ids with a (B, T) mask,
hidden states (B, H), coordinates (B, 2). The initial hidden state is zero.

    r  = sigmoid(x W_r^T + h U_r^T + b_r)
    z  = sigmoid(x W_z^T + h U_z^T + b_z)
    n  = tanh(x W_n^T + r * (h U_n^T) + b_n)
    h' = z * h + (1 - z) * n
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from schemas.documents import TensorEntry, WeightFile
from schemas.gridworld import AgentSpec
from semantics.errors import ConfigError, UnknownToken

GATES = ("r", "z", "n")

PARAM_GROUPS: Dict[str, Tuple[str, ...]] = {
    "embedding": ("embedding",),
    "recurrent": tuple(f"{kind}_{g}" for g in GATES for kind in ("W", "U", "b")),
    "decoder": ("W_out", "b_out"),
}


def sigmoid(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * x))


class ForwardCache:
    """Per-step activations kept for the backward pass."""

    def __init__(self, ids: np.ndarray, mask: np.ndarray) -> None:
        self.ids = ids
        self.mask = mask
        self.steps: List[Dict[str, np.ndarray]] = []
        self.h_final: Optional[np.ndarray] = None


class GridAgent:
    def __init__(self, vocab: Sequence[str], params: Dict[str, np.ndarray], seed: int = 0) -> None:
        self.vocab: List[str] = list(vocab)
        self.index = {tok: i for i, tok in enumerate(self.vocab)}
        self.params = {k: np.asarray(v, dtype=np.float64) for k, v in params.items()}
        self.seed = seed
        self._check_shapes()

    @property
    def embed_dim(self) -> int:
        return self.params["embedding"].shape[1]

    @property
    def hidden_dim(self) -> int:
        return self.params["U_r"].shape[0]

    def _check_shapes(self) -> None:
        V, E, H = len(self.vocab), self.params["embedding"].shape[1], self.params["U_r"].shape[0]
        expected = {"embedding": (V, E), "W_out": (2, H), "b_out": (2,)}
        for g in GATES:
            expected.update({f"W_{g}": (H, E), f"U_{g}": (H, H), f"b_{g}": (H,)})
        for name, shape in expected.items():
            if name not in self.params:
                raise ConfigError(f"missing parameter tensor {name!r}")
            if self.params[name].shape != shape:
                raise ConfigError(f"parameter {name!r} has shape {self.params[name].shape}, expected {shape}")

    @classmethod
    def initialize(cls, vocab: Sequence[str], spec: AgentSpec) -> "GridAgent":
        """Embedding ~ N(0, 1); everything else uniform in +/- 1/sqrt(hidden)."""
        rng = np.random.Generator(np.random.Philox(key=spec.seed))
        V, E, H = len(vocab), spec.embed_dim, spec.hidden_dim
        bound = 1.0 / np.sqrt(H)
        params: Dict[str, np.ndarray] = {"embedding": rng.standard_normal((V, E))}
        for g in GATES:
            params[f"W_{g}"] = rng.uniform(-bound, bound, (H, E))
            params[f"U_{g}"] = rng.uniform(-bound, bound, (H, H))
            params[f"b_{g}"] = rng.uniform(-bound, bound, H)
        params["W_out"] = rng.uniform(-bound, bound, (2, H))
        params["b_out"] = rng.uniform(-bound, bound, 2)
        return cls(vocab, params, seed=spec.seed)

    def copy(self) -> "GridAgent":
        return GridAgent(self.vocab, {k: v.copy() for k, v in self.params.items()}, seed=self.seed)

    # tokens

    def token_ids(self, tokens: Sequence[str]) -> List[int]:
        ids = []
        for tok in tokens:
            if tok not in self.index:
                raise UnknownToken(tok)
            ids.append(self.index[tok])
        return ids

    def batch(self, commands: Sequence[Sequence[str]]) -> Tuple[np.ndarray, np.ndarray]:
        """Pad commands to a common length; mask marks real tokens."""
        if not commands:
            raise ConfigError("empty command batch")
        T = max(len(c) for c in commands)
        ids = np.zeros((len(commands), T), dtype=np.int64)
        mask = np.zeros((len(commands), T), dtype=np.float64)
        for b, cmd in enumerate(commands):
            if not cmd:
                raise ConfigError("empty command")
            row = self.token_ids(cmd)
            ids[b, : len(row)] = row
            mask[b, : len(row)] = 1.0
        return ids, mask

    # forward

    def encode_batch(self, ids: np.ndarray, mask: np.ndarray) -> Tuple[np.ndarray, ForwardCache]:
        p = self.params
        B, T = ids.shape
        h = np.zeros((B, self.hidden_dim))
        cache = ForwardCache(ids, mask)
        for t in range(T):
            x = p["embedding"][ids[:, t]]
            m = mask[:, t:t + 1]
            r = sigmoid(x @ p["W_r"].T + h @ p["U_r"].T + p["b_r"])
            z = sigmoid(x @ p["W_z"].T + h @ p["U_z"].T + p["b_z"])
            uh = h @ p["U_n"].T
            n = np.tanh(x @ p["W_n"].T + r * uh + p["b_n"])
            h_new = z * h + (1.0 - z) * n
            cache.steps.append({"x": x, "h_prev": h, "r": r, "z": z, "n": n, "uh": uh, "m": m})
            h = m * h_new + (1.0 - m) * h
        cache.h_final = h
        return h, cache

    def decode(self, h: np.ndarray) -> np.ndarray:
        return h @ self.params["W_out"].T + self.params["b_out"]

    def predict_batch(self, commands: Sequence[Sequence[str]]) -> Tuple[np.ndarray, ForwardCache]:
        ids, mask = self.batch(commands)
        h, cache = self.encode_batch(ids, mask)
        return self.decode(h), cache

    def hidden_state(self, tokens: Sequence[str]) -> np.ndarray:
        ids, mask = self.batch([tokens])
        h, _ = self.encode_batch(ids, mask)
        return h[0]

    def forward(self, tokens: Sequence[str]) -> Tuple[np.ndarray, np.ndarray]:
        """(hidden state sequence (T, H), predicted coordinate (2,))."""
        ids, mask = self.batch([tokens])
        h, cache = self.encode_batch(ids, mask)
        states = np.stack([s["h_prev"][0] for s in cache.steps[1:]] + [h[0]])
        return states, self.decode(h)[0]

    # backward

    def backward(self, cache: ForwardCache, d_out: np.ndarray) -> Dict[str, np.ndarray]:
        """Gradients of a loss given dL/d(coordinates) of shape (B, 2)."""
        p = self.params
        grads = {k: np.zeros_like(v) for k, v in p.items()}
        grads["W_out"] = d_out.T @ cache.h_final
        grads["b_out"] = d_out.sum(axis=0)
        dh = d_out @ p["W_out"]
        for t in reversed(range(len(cache.steps))):
            s = cache.steps[t]
            x, h_prev, r, z, n, uh, m = s["x"], s["h_prev"], s["r"], s["z"], s["n"], s["uh"], s["m"]
            d_new = dh * m
            dh_prev = dh * (1.0 - m) + d_new * z
            da_n = d_new * (1.0 - z) * (1.0 - n ** 2)
            da_z = d_new * (h_prev - n) * z * (1.0 - z)
            da_r = da_n * uh * r * (1.0 - r)
            d_uh = da_n * r

            grads["W_n"] += da_n.T @ x
            grads["U_n"] += d_uh.T @ h_prev
            grads["b_n"] += da_n.sum(axis=0)
            grads["W_z"] += da_z.T @ x
            grads["U_z"] += da_z.T @ h_prev
            grads["b_z"] += da_z.sum(axis=0)
            grads["W_r"] += da_r.T @ x
            grads["U_r"] += da_r.T @ h_prev
            grads["b_r"] += da_r.sum(axis=0)

            dx = da_n @ p["W_n"] + da_z @ p["W_z"] + da_r @ p["W_r"]
            dh_prev = dh_prev + d_uh @ p["U_n"] + da_z @ p["U_z"] + da_r @ p["U_r"]
            np.add.at(grads["embedding"], cache.ids[:, t], dx * m)
            dh = dh_prev
        return grads

    # serialization

    def to_weight_file(self, training: Optional[dict] = None) -> WeightFile:
        return WeightFile(
            widths={"vocab": len(self.vocab), "embed": self.embed_dim, "hidden": self.hidden_dim},
            seed=self.seed,
            vocab=self.vocab,
            tensors={
                name: TensorEntry(shape=list(arr.shape), data=arr.ravel().tolist())
                for name, arr in sorted(self.params.items())
            },
            training=training,
        )

    @classmethod
    def from_weight_file(cls, wf: WeightFile) -> "GridAgent":
        params = {
            name: np.asarray(t.data, dtype=np.float64).reshape(t.shape)
            for name, t in wf.tensors.items()
        }
        agent = cls(wf.vocab, params, seed=wf.seed)
        if (agent.embed_dim, agent.hidden_dim, len(agent.vocab)) != (
            wf.widths.get("embed"), wf.widths.get("hidden"), wf.widths.get("vocab")
        ):
            raise ConfigError("weight file header widths do not match its tensors")
        return agent
