"""Classification and firing-activity metrics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.stats import rankdata

__all__ = ["auc_roc", "auc_ci", "FiringStats", "firing_stats"]


def _binary_auc(scores: np.ndarray, positive: np.ndarray) -> float:
    n_pos = int(positive.sum())
    n_neg = positive.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs at least one positive and one negative sample")
    ranks = rankdata(scores, method="average")
    return float((ranks[positive].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def auc_roc(scores, labels) -> float:
    """Rank-based ROC AUC with average ranks for ties.

    ``scores`` is either a vector of decision values for label 1 (binary
    problems) or an ``(N, K)`` matrix of per-class scores, in which case the
    one-vs-rest AUCs are macro-averaged over the classes present.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    classes = np.unique(labels)
    if classes.size < 2:
        raise ValueError("AUC is undefined for single-class input")
    if scores.ndim == 1:
        if classes.size != 2:
            raise ValueError("1-D scores need binary labels; pass an (N, K) score matrix for multiclass")
        return _binary_auc(scores, labels == classes[1])
    if scores.shape[0] != labels.shape[0]:
        raise ValueError("scores and labels disagree on the number of samples")
    if classes.size == 2:
        return _binary_auc(scores[:, int(classes[1])], labels == classes[1])
    return float(np.mean([_binary_auc(scores[:, int(c)], labels == c) for c in classes]))


def auc_ci(auc: float, n_pos: int, n_neg: int, z: float = 1.959964) -> tuple[float, float]:
    """Hanley-McNeil normal interval, clipped to [0, 1]."""
    if n_pos < 1 or n_neg < 1:
        return (float("nan"), float("nan"))
    q1 = auc / (2.0 - auc)
    q2 = 2.0 * auc * auc / (1.0 + auc)
    var = (auc * (1 - auc) + (n_pos - 1) * (q1 - auc**2) + (n_neg - 1) * (q2 - auc**2)) / (n_pos * n_neg)
    se = float(np.sqrt(max(var, 0.0)))
    return max(0.0, auc - z * se), min(1.0, auc + z * se)


@dataclass
class FiringStats:
    """Spiking activity over an evaluation pass.

    ``afp`` is the average firing probability per timestep per neuron over
    all spiking (non-input) layers; ``sparsity_ratio`` the fraction of hidden
    neurons that never fired.
    """

    afp: float
    sparsity_ratio: float
    layer_afp: list[float] = field(default_factory=list)
    layer_silent: list[float] = field(default_factory=list)

    def __post_init__(self):
        for name in ("afp", "sparsity_ratio"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {value}")

    def to_dict(self) -> dict:
        return {
            "afp": self.afp,
            "sparsity_ratio": self.sparsity_ratio,
            "layer_afp": list(self.layer_afp),
            "layer_silent": list(self.layer_silent),
        }


def firing_stats(layer_spikes: Sequence[np.ndarray], mask: Optional[np.ndarray] = None) -> FiringStats:
    """Summarise per-layer rasters of shape ``(B, T, n)``.

    The last entry is the output layer.  ``mask`` of shape ``(B, T)`` marks
    valid (unpadded) steps.
    """
    if not layer_spikes:
        raise ValueError("need at least one layer")
    B, T = layer_spikes[0].shape[:2]
    mask = np.ones((B, T)) if mask is None else np.asarray(mask, dtype=float)
    steps = mask.sum()
    total_spikes = 0.0
    total_slots = 0.0
    layer_afp, layer_silent = [], []
    for o in layer_spikes:
        n = o.shape[-1]
        fired = np.einsum("btn,bt->n", o, mask)
        layer_afp.append(float(fired.sum() / (steps * n)) if steps else 0.0)
        layer_silent.append(float(np.mean(fired == 0)))
        total_spikes += fired.sum()
        total_slots += steps * n
    afp = float(total_spikes / total_slots) if total_slots else 0.0
    hidden = layer_spikes[:-1] if len(layer_spikes) > 1 else layer_spikes
    silent = np.concatenate([np.einsum("btn,bt->n", o, mask) == 0 for o in hidden])
    return FiringStats(afp=min(afp, 1.0), sparsity_ratio=float(silent.mean()), layer_afp=layer_afp, layer_silent=layer_silent)
