"""Dense tanh recurrent baseline trained under the same curriculum schedule.

Inputs are the normalised raw values, one feature per variable.  The class
logits are a linear read-out of the masked time-average of the hidden state.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
from scipy.special import log_softmax, softmax

from .curriculum import CurriculumSchedule
from .data import Dataset
from .encoding import EncodedSet
from .learning import LossReport, OptimizerConfig, TrainingError, _clip

__all__ = ["DenseRNN", "raw_set", "matched_hidden_size", "train_dense_epoch", "evaluate_dense"]


def raw_set(dataset: Dataset) -> EncodedSet:
    """Pad raw values into an ``EncodedSet`` of shape ``(N, T, D)``."""
    T = max(s.length for s in dataset.samples)
    D = dataset.samples[0].n_vars
    x = np.zeros((len(dataset), T, D))
    mask = np.zeros((len(dataset), T))
    dt = np.ones((len(dataset), T))
    for i, s in enumerate(dataset.samples):
        x[i, : s.length] = s.values
        mask[i, : s.length] = 1.0
        if s.length > 1:
            dt[i, 1 : s.length] = np.diff(s.timestamps)
    return EncodedSet(x, dt, mask, dataset.labels)


def matched_hidden_size(n_params: int, n_in: int, n_classes: int) -> int:
    """Largest hidden width whose parameter count does not exceed ``n_params``."""
    # params = h*n_in + h*h + h + n_classes*h + n_classes
    b = n_in + 1 + n_classes
    h = int((-b + math.sqrt(b * b + 4 * max(n_params - n_classes, 0))) / 2)
    return max(h, 1)


class DenseRNN:
    """``h_t = tanh(W_x x_t + W_h h_{t-1} + b)``, logits ``W_o mean(h) + c``."""

    def __init__(self, n_in: int, n_hidden: int, n_classes: int, seed: Optional[int] = None):
        rng = np.random.default_rng(seed)
        self.w_x = rng.normal(0, 1 / math.sqrt(n_in), (n_hidden, n_in))
        self.w_h = rng.normal(0, 1 / math.sqrt(n_hidden), (n_hidden, n_hidden))
        self.b = np.zeros(n_hidden)
        self.w_o = rng.normal(0, 1 / math.sqrt(n_hidden), (n_classes, n_hidden))
        self.c = np.zeros(n_classes)

    @property
    def n_classes(self) -> int:
        return self.w_o.shape[0]

    def params(self) -> list[np.ndarray]:
        return [self.w_x, self.w_h, self.b, self.w_o, self.c]

    def set_params(self, params: list[np.ndarray]) -> None:
        self.w_x, self.w_h, self.b, self.w_o, self.c = (np.array(p) for p in params)

    @property
    def n_params(self) -> int:
        return sum(p.size for p in self.params())

    def _forward(self, data: EncodedSet):
        B, T, _ = data.x.shape
        n = self.w_h.shape[0]
        h = np.zeros((B, T + 1, n))
        for t in range(T):
            h[:, t + 1] = np.tanh(data.x[:, t] @ self.w_x.T + h[:, t] @ self.w_h.T + self.b)
        length = data.mask.sum(axis=1, keepdims=True)
        pooled = np.einsum("btn,bt->bn", h[:, 1:], data.mask) / length
        logits = pooled @ self.w_o.T + self.c
        return h, pooled, logits, length

    def predict_proba(self, data: EncodedSet) -> np.ndarray:
        return softmax(self._forward(data)[2], axis=-1)

    def loss_and_grad(self, data: EncodedSet) -> tuple[float, list[np.ndarray]]:
        h, pooled, logits, length = self._forward(data)
        B, T, _ = data.x.shape
        logp = log_softmax(logits, axis=-1)
        idx = np.arange(B)
        value = float(-logp[idx, data.labels].mean())
        g_logits = np.exp(logp)
        g_logits[idx, data.labels] -= 1.0
        g_logits /= B
        g_wo = g_logits.T @ pooled
        g_c = g_logits.sum(axis=0)
        g_pooled = g_logits @ self.w_o
        g_wx = np.zeros_like(self.w_x)
        g_wh = np.zeros_like(self.w_h)
        g_b = np.zeros_like(self.b)
        g_h_next = np.zeros_like(pooled)
        for t in range(T - 1, -1, -1):
            g_h = g_pooled * (data.mask[:, t, None] / length) + g_h_next
            g_a = g_h * (1.0 - h[:, t + 1] ** 2)
            g_wx += g_a.T @ data.x[:, t]
            g_wh += g_a.T @ h[:, t]
            g_b += g_a.sum(axis=0)
            g_h_next = g_a @ self.w_h
        return value, [g_wx, g_wh, g_b, g_wo, g_c]


def evaluate_dense(model: DenseRNN, data: EncodedSet) -> LossReport:
    if len(data) == 0:
        return LossReport.empty(model.n_classes)
    logits = model._forward(data)[2]
    logp = log_softmax(logits, axis=-1)
    idx = np.arange(len(data))
    probs = np.exp(logp)
    return LossReport(
        per_sample_loss=-logp[idx, data.labels],
        activity=probs[idx, data.labels],
        predicted_class=np.argmax(logits, axis=-1),
        probabilities=probs,
        labels=np.asarray(data.labels).copy(),
    )


def train_dense_epoch(
    model: DenseRNN,
    data: EncodedSet,
    schedule: CurriculumSchedule,
    opt: OptimizerConfig,
    epoch: int = 0,
) -> tuple[DenseRNN, LossReport]:
    lr = opt.lr_at(epoch)
    for step, batch in enumerate(schedule.batches()):
        _, grads = model.loss_and_grad(data.subset(batch))
        if not all(np.all(np.isfinite(g)) for g in grads):
            raise TrainingError(f"non-finite baseline gradient at epoch {epoch}, step {step}")
        grads = _clip(grads, opt.grad_clip)
        model.set_params([p - lr * g for p, g in zip(model.params(), grads)])
    return model, evaluate_dense(model, data)
