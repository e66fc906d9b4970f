"""Predicate-aware late fusion over precomputed sentence embeddings.

The NLI embedding is concatenated with 40-dimensional projections of the
premise and hypothesis predicate-role embeddings; a linear classifier over
the concatenation produces the three label scores. Encoders are out of
scope: embeddings arrive from files.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .pairgen import LABELS

PROJ_DIM = 40


@dataclass
class FusionHead:
    w_p: np.ndarray  # (PROJ_DIM, d_srl)
    b_p: np.ndarray  # (PROJ_DIM,)
    w_h: np.ndarray
    b_h: np.ndarray
    w_out: np.ndarray  # (3, d_nli + 2*PROJ_DIM)
    b_out: np.ndarray  # (3,)

    def __post_init__(self):
        for name in ("w_p", "b_p", "w_h", "b_h", "w_out", "b_out"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        if self.w_p.shape[0] != PROJ_DIM or self.w_h.shape[0] != PROJ_DIM:
            raise ValueError(f"projections must map to exactly {PROJ_DIM} dims")
        if self.b_p.shape != (PROJ_DIM,) or self.b_h.shape != (PROJ_DIM,):
            raise ValueError("projection biases must match the projection dim")
        d_nli = self.w_out.shape[1] - 2 * PROJ_DIM
        if self.w_out.shape[0] != len(LABELS) or d_nli <= 0:
            raise ValueError(f"classifier shape {self.w_out.shape} is inconsistent")
        if self.b_out.shape != (len(LABELS),):
            raise ValueError("classifier bias must have one entry per label")

    @property
    def d_nli(self) -> int:
        return self.w_out.shape[1] - 2 * PROJ_DIM

    @property
    def d_srl(self) -> int:
        return self.w_p.shape[1]

    @classmethod
    def zeros(cls, d_nli: int, d_srl: int) -> "FusionHead":
        return cls(
            w_p=np.zeros((PROJ_DIM, d_srl)), b_p=np.zeros(PROJ_DIM),
            w_h=np.zeros((PROJ_DIM, d_srl)), b_h=np.zeros(PROJ_DIM),
            w_out=np.zeros((len(LABELS), d_nli + 2 * PROJ_DIM)),
            b_out=np.zeros(len(LABELS)),
        )

    @classmethod
    def random(cls, d_nli: int, d_srl: int, seed: int = 0, scale: float = 0.1) -> "FusionHead":
        rng = np.random.default_rng(seed)
        return cls(
            w_p=scale * rng.standard_normal((PROJ_DIM, d_srl)),
            b_p=scale * rng.standard_normal(PROJ_DIM),
            w_h=scale * rng.standard_normal((PROJ_DIM, d_srl)),
            b_h=scale * rng.standard_normal(PROJ_DIM),
            w_out=scale * rng.standard_normal((len(LABELS), d_nli + 2 * PROJ_DIM)),
            b_out=scale * rng.standard_normal(len(LABELS)),
        )

    def to_dict(self) -> dict:
        return {name: getattr(self, name).tolist()
                for name in ("w_p", "b_p", "w_h", "b_h", "w_out", "b_out")}

    @classmethod
    def from_dict(cls, data: dict) -> "FusionHead":
        return cls(**{k: np.asarray(v, dtype=float) for k, v in data.items()})


def fuse_predict(head: FusionHead, c_nli, c_p, c_h) -> np.ndarray:
    """Label scores for one embedding triple."""
    c_nli = np.asarray(c_nli, dtype=float)
    c_p = np.asarray(c_p, dtype=float)
    c_h = np.asarray(c_h, dtype=float)
    if c_nli.shape != (head.d_nli,) or c_p.shape != (head.d_srl,) or c_h.shape != (head.d_srl,):
        raise ValueError(
            f"embedding dims {c_nli.shape}/{c_p.shape}/{c_h.shape} do not match "
            f"head dims ({head.d_nli},)/({head.d_srl},)"
        )
    fused = np.concatenate([c_nli, head.w_p @ c_p + head.b_p, head.w_h @ c_h + head.b_h])
    return head.w_out @ fused + head.b_out


def _softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def loss_and_grads(head: FusionHead, batch) -> tuple[float, dict[str, np.ndarray]]:
    """Mean cross-entropy over (c_nli, c_p, c_h, label_index) rows, with
    analytic gradients for every head parameter."""
    grads = {name: np.zeros_like(getattr(head, name))
             for name in ("w_p", "b_p", "w_h", "b_h", "w_out", "b_out")}
    total = 0.0
    n = len(batch)
    if n == 0:
        raise ValueError("empty batch")
    d = head.d_nli
    for c_nli, c_p, c_h, label_idx in batch:
        c_nli = np.asarray(c_nli, dtype=float)
        c_p = np.asarray(c_p, dtype=float)
        c_h = np.asarray(c_h, dtype=float)
        proj_p = head.w_p @ c_p + head.b_p
        proj_h = head.w_h @ c_h + head.b_h
        fused = np.concatenate([c_nli, proj_p, proj_h])
        probs = _softmax(head.w_out @ fused + head.b_out)
        total -= float(np.log(probs[label_idx] + 1e-300))
        g_logits = probs.copy()
        g_logits[label_idx] -= 1.0
        grads["w_out"] += np.outer(g_logits, fused)
        grads["b_out"] += g_logits
        g_fused = head.w_out.T @ g_logits
        g_p = g_fused[d:d + PROJ_DIM]
        g_h = g_fused[d + PROJ_DIM:]
        grads["w_p"] += np.outer(g_p, c_p)
        grads["b_p"] += g_p
        grads["w_h"] += np.outer(g_h, c_h)
        grads["b_h"] += g_h
    for name in grads:
        grads[name] /= n
    return total / n, grads


def fit_fusion_head(head: FusionHead, batch, learning_rate: float = 0.5,
                    steps: int = 200) -> list[float]:
    """Full-batch gradient descent; returns the per-step loss trace."""
    trace = []
    for _ in range(steps):
        loss, grads = loss_and_grads(head, batch)
        trace.append(loss)
        for name, grad in grads.items():
            setattr(head, name, getattr(head, name) - learning_rate * grad)
    return trace


def predict_label(head: FusionHead, c_nli, c_p, c_h) -> str:
    return LABELS[int(np.argmax(fuse_predict(head, c_nli, c_p, c_h)))]


def load_embeddings(path) -> list[dict]:
    """JSONL rows {id, c_nli, c_p, c_h, label}."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            rows.append({
                "id": rec["id"],
                "c_nli": np.asarray(rec["c_nli"], dtype=float),
                "c_p": np.asarray(rec["c_p"], dtype=float),
                "c_h": np.asarray(rec["c_h"], dtype=float),
                "label": rec["label"],
            })
        except (ValueError, KeyError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    return rows


def embeddings_to_batch(rows) -> list[tuple]:
    return [
        (row["c_nli"], row["c_p"], row["c_h"], LABELS.index(row["label"]))
        for row in rows
    ]
