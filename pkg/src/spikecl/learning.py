"""Surrogate-gradient BPTT training of the recurrent spiking classifier.

The class score of a series is the total spike count of the corresponding
output neuron; a softmax over counts gives the activity distribution and
the loss is the negative log of its true-class entry.  The Heaviside spike
function is kept in the forward pass and its derivative replaced by the
derivative of a logistic of slope ``s`` in the backward pass.
"""

from __future__ import annotations

import base64
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.special import log_softmax, softmax

from .curriculum import CurriculumSchedule
from .encoding import EncodedSet
from .metrics import FiringStats, firing_stats
from .spiking import LayerRecord, NetworkTopology, NeuronParams, simulate

__all__ = [
    "TrainingError",
    "LossReport",
    "OptimizerConfig",
    "SpikingClassifier",
    "activity_score",
    "loss",
    "backward",
    "train_epoch",
    "evaluate",
    "save_checkpoint",
    "load_checkpoint",
]

CHECKPOINT_FORMAT = "spikecl-checkpoint"
CHECKPOINT_VERSION = 1


class TrainingError(FloatingPointError):
    """Non-finite loss or gradient during training."""


def activity_score(output_spikes, n_classes: Optional[int] = None) -> np.ndarray:
    """Softmax over per-class spike counts.

    Accepts a ``SpikeTensor``, a ``(T, C)`` raster, or a batch ``(B, T, C)``.
    """
    spikes = np.asarray(getattr(output_spikes, "spikes", output_spikes), dtype=float)
    if n_classes is not None and spikes.shape[-1] != n_classes:
        raise ValueError(f"output layer has {spikes.shape[-1]} neurons, expected {n_classes}")
    counts = spikes.sum(axis=-2)
    return softmax(counts, axis=-1)


def loss(output_spikes, label: int) -> float:
    """``-log`` of the true-class activity of one output raster."""
    spikes = np.asarray(getattr(output_spikes, "spikes", output_spikes), dtype=float)
    counts = spikes.sum(axis=0)
    if not 0 <= label < counts.size:
        raise ValueError(f"label {label} outside 0..{counts.size - 1}")
    return float(-log_softmax(counts)[label])


@dataclass
class LossReport:
    """Per-sample losses, true-class activity and predictions."""

    per_sample_loss: np.ndarray
    activity: np.ndarray
    predicted_class: np.ndarray
    probabilities: np.ndarray
    labels: np.ndarray

    @classmethod
    def empty(cls, n_classes: int = 0) -> "LossReport":
        z = np.zeros(0)
        return cls(z, z.copy(), np.zeros(0, dtype=int), np.zeros((0, n_classes)), np.zeros(0, dtype=int))

    @property
    def mean_loss(self) -> float:
        return float(self.per_sample_loss.mean()) if self.per_sample_loss.size else float("nan")

    @property
    def accuracy(self) -> float:
        return float(np.mean(self.predicted_class == self.labels)) if self.labels.size else float("nan")

    def __eq__(self, other):
        if not isinstance(other, LossReport):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, k), getattr(other, k))
            for k in ("per_sample_loss", "activity", "predicted_class", "probabilities", "labels")
        )


@dataclass
class OptimizerConfig:
    """Plain SGD with a step learning-rate decay.

    ``batch_size=None`` trains on the whole curriculum pool at every step.
    ``truncation`` cuts the backward pass into windows of that many steps.
    """

    learning_rate: float = 1e-2
    lr_decay: float = 0.5
    decay_every: int = 10
    surrogate_slope: float = 5.0
    epochs: int = 100
    seed: int = 0
    batch_size: Optional[int] = 8
    grad_clip: Optional[float] = None
    truncation: Optional[int] = None

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be non-negative")
        if self.surrogate_slope <= 0:
            raise ValueError("surrogate_slope must be positive")
        if not (0 < self.lr_decay <= 1):
            raise ValueError("lr_decay must lie in (0, 1]")
        if self.decay_every < 1:
            raise ValueError("decay_every must be at least 1")

    def lr_at(self, epoch: int) -> float:
        return self.learning_rate * self.lr_decay ** (epoch // self.decay_every)


def _logistic(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


class SpikingClassifier:
    """Recurrent spiking network whose last layer has one neuron per class."""

    def __init__(self, topology: NetworkTopology, surrogate_slope: float = 5.0):
        self.topology = topology
        self.surrogate_slope = float(surrogate_slope)

    @classmethod
    def build(
        cls,
        n_input: int,
        hidden: list[int] | int,
        n_classes: int,
        *,
        recurrent_hidden: bool = True,
        seed: Optional[int] = None,
        surrogate_slope: float = 5.0,
        **topology_kwargs,
    ) -> "SpikingClassifier":
        hidden = [hidden] if isinstance(hidden, int) else list(hidden)
        sizes = [n_input] + hidden + [n_classes]
        recurrent = [recurrent_hidden] * len(hidden) + [False]
        topo = NetworkTopology.random(sizes, recurrent, seed=seed, **topology_kwargs)
        return cls(topo, surrogate_slope)

    @property
    def n_classes(self) -> int:
        return self.topology.layer_sizes[-1]

    def weights(self) -> list[np.ndarray]:
        return [self.topology.combined_weights(l) for l in range(self.topology.n_layers)]

    def set_weights(self, weights: list[np.ndarray]) -> None:
        topo = self.topology
        for l, w in enumerate(weights):
            n_pre = topo.layer_sizes[l]
            topo.ff_weights[l] = np.array(w[:, :n_pre])
            if topo.recurrent[l]:
                topo.rec_weights[l] = np.array(w[:, n_pre:])

    def copy(self) -> "SpikingClassifier":
        return SpikingClassifier(self.topology.copy(), self.surrogate_slope)

    def forward(self, x, dt=None, smooth: bool = False, weights=None) -> list[LayerRecord]:
        return simulate(x, self.topology, dt, self.surrogate_slope if smooth else None, weights)

    def loss_and_grad(
        self,
        data: EncodedSet,
        smooth: bool = False,
        weights=None,
        truncation: Optional[int] = None,
    ) -> tuple[float, list[np.ndarray], list[LayerRecord]]:
        """Mean loss over ``data`` and its gradient w.r.t. each layer's combined weights."""
        dt = None if data.regular else data.dt
        records = self.forward(data.x, dt, smooth, weights)
        counts = np.einsum("btc,bt->bc", records[-1].o, data.mask)
        logp = log_softmax(counts, axis=-1)
        B = counts.shape[0]
        value = float(-logp[np.arange(B), data.labels].mean())
        if not math.isfinite(value):
            raise TrainingError("loss is not finite")
        g_counts = np.exp(logp)
        g_counts[np.arange(B), data.labels] -= 1.0
        g_counts /= B
        g_out = g_counts[:, None, :] * data.mask[:, :, None]
        grads = backward(
            records,
            self.topology,
            g_out,
            self.surrogate_slope,
            weights if weights is not None else self.weights(),
            truncation=truncation,
        )
        return value, grads, records

    def predict_proba(self, data: EncodedSet) -> tuple[np.ndarray, list[LayerRecord]]:
        records = self.forward(data.x, None if data.regular else data.dt)
        counts = np.einsum("btc,bt->bc", records[-1].o, data.mask)
        return softmax(counts, axis=-1), records


def backward(
    records: list[LayerRecord],
    topology: NetworkTopology,
    g_out: np.ndarray,
    slope: float,
    weights: list[np.ndarray],
    truncation: Optional[int] = None,
) -> list[np.ndarray]:
    """Backpropagate ``dL/dO`` of the last layer through time and layers.

    Each layer is handled over the full sequence before the layer below it;
    the traces, reset and recurrent paths all carry gradient backwards in
    time.  ``truncation`` zeroes the temporal carries every that many steps.
    """
    grads: list[Optional[np.ndarray]] = [None] * topology.n_layers
    g_o_ext = g_out
    for l in reversed(range(topology.n_layers)):
        rec = records[l]
        w = weights[l]
        p = topology.params[l]
        th, v0 = p.v_threshold, p.v0
        n_pre = topology.layer_sizes[l]
        B, T, n = rec.v.shape
        fan = w.shape[1]
        sig = _logistic(slope * (rec.v - th))
        deriv = slope * sig * (1.0 - sig)
        g_v_all = np.empty((B, T, n))
        g_in = np.zeros((B, T, n_pre)) if l > 0 else None
        g_m_carry = np.zeros((B, fan))
        g_h_carry = np.zeros((B, fan))
        g_r_carry = np.zeros((B, n))  # gamma_{t+1} * dL/dR_{t+1}
        g_o_from_r = np.zeros((B, n))  # dL/dR_{t+1}: R_{t+1} gains O_t
        g_o_from_x = np.zeros((B, n))  # recurrent lines of x_{t+1} carry O_t
        for t in range(T - 1, -1, -1):
            if truncation and (T - 1 - t) % truncation == 0 and t != T - 1:
                g_m_carry[:] = 0.0
                g_h_carry[:] = 0.0
                g_r_carry[:] = 0.0
                g_o_from_r[:] = 0.0
                g_o_from_x[:] = 0.0
            g_o = g_o_ext[:, t] + g_o_from_r + g_o_from_x
            g_v = g_o * deriv[:, t]
            g_v_all[:, t] = g_v
            g_psp = g_v @ w
            g_m = v0 * g_psp + g_m_carry
            g_h = g_h_carry - v0 * g_psp
            g_r = g_r_carry - th * g_v
            g_x = g_m + g_h
            if g_in is not None:
                g_in[:, t] = g_x[:, :n_pre]
            g_o_from_x = g_x[:, n_pre:] if topology.recurrent[l] else g_o_from_x
            g_o_from_r = g_r
            g_m_carry = g_m * rec.alpha[:, t, None]
            g_h_carry = g_h * rec.beta[:, t, None]
            g_r_carry = g_r * rec.gamma[:, t, None]
        grads[l] = np.einsum("btn,btf->nf", g_v_all, rec.psp)
        g_o_ext = g_in
    return grads


def _clip(grads: list[np.ndarray], max_norm: Optional[float]) -> list[np.ndarray]:
    if max_norm is None:
        return grads
    total = math.sqrt(sum(float(np.sum(g * g)) for g in grads))
    if total > max_norm:
        grads = [g * (max_norm / total) for g in grads]
    return grads


def evaluate(model: SpikingClassifier, data: EncodedSet) -> tuple[LossReport, FiringStats]:
    """Forward pass only; returns per-sample losses and firing statistics."""
    if len(data) == 0:
        return LossReport.empty(model.n_classes), FiringStats(0.0, 1.0)
    probs, records = model.predict_proba(data)
    with np.errstate(divide="ignore"):
        counts = np.einsum("btc,bt->bc", records[-1].o, data.mask)
        logp = log_softmax(counts, axis=-1)
    idx = np.arange(len(data))
    per_sample = -logp[idx, data.labels]
    report = LossReport(
        per_sample_loss=per_sample,
        activity=probs[idx, data.labels],
        predicted_class=np.argmax(counts, axis=-1),
        probabilities=probs,
        labels=np.asarray(data.labels).copy(),
    )
    stats = firing_stats([r.o for r in records], data.mask)
    return report, stats


def train_epoch(
    model: SpikingClassifier,
    data: EncodedSet,
    schedule: CurriculumSchedule,
    opt: OptimizerConfig,
    epoch: int = 0,
) -> tuple[SpikingClassifier, LossReport, FiringStats, list[float]]:
    """Run every step of ``schedule`` once, then re-evaluate the training set.

    Returns the (in-place updated) model, the post-epoch per-sample report,
    firing statistics of the post-epoch pass, and the mean batch loss of
    each step.
    """
    lr = opt.lr_at(epoch)
    step_losses = []
    for step, batch in enumerate(schedule.batches()):
        value, grads, _ = model.loss_and_grad(data.subset(batch), truncation=opt.truncation)
        for l, g in enumerate(grads):
            if not np.all(np.isfinite(g)):
                raise TrainingError(f"non-finite gradient in layer {l} at epoch {epoch}, step {step}, batch {list(batch)}")
        grads = _clip(grads, opt.grad_clip)
        if lr > 0:
            model.set_weights([w - lr * g for w, g in zip(model.weights(), grads)])
        step_losses.append(value)
    report, stats = evaluate(model, data)
    return model, report, stats, step_losses


def _encode_array(a: np.ndarray) -> dict:
    a = np.ascontiguousarray(a, dtype="<f8")
    return {"shape": list(a.shape), "data": base64.b64encode(a.tobytes()).decode("ascii")}


def _decode_array(d: dict) -> np.ndarray:
    raw = base64.b64decode(d["data"])
    return np.frombuffer(raw, dtype="<f8").reshape(d["shape"]).copy()


def save_checkpoint(model: SpikingClassifier, path, extra: Optional[dict] = None) -> None:
    """Write topology, weights, neuron parameters and seed as JSON.

    Arrays are stored as base64 of little-endian float64, so a load/save
    cycle reproduces the file byte for byte.
    """
    topo = model.topology
    doc = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "layer_sizes": list(topo.layer_sizes),
        "recurrent": list(topo.recurrent),
        "seed": topo.seed,
        "surrogate_slope": float.hex(model.surrogate_slope),
        "params": [
            {
                "tau_m": float.hex(p.tau_m),
                "tau_s": float.hex(p.tau_s),
                "tau": float.hex(p.tau),
                "v_threshold": float.hex(p.v_threshold),
                "v0_mode": p.v0_mode.value,
                "dt": float.hex(p.dt),
            }
            for p in topo.params
        ],
        "ff_weights": [_encode_array(w) for w in topo.ff_weights],
        "rec_weights": [None if w is None else _encode_array(w) for w in topo.rec_weights],
        "v_init": [_encode_array(v) for v in topo.v_init],
        "extra": extra or {},
    }
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def load_checkpoint(path) -> tuple[SpikingClassifier, dict]:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"{path} is not a spikecl checkpoint")
    if doc.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {doc.get('version')}")
    params = [
        NeuronParams(
            tau_m=float.fromhex(p["tau_m"]),
            tau_s=float.fromhex(p["tau_s"]),
            tau=float.fromhex(p["tau"]),
            v_threshold=float.fromhex(p["v_threshold"]),
            v0_mode=p["v0_mode"],
            dt=float.fromhex(p["dt"]),
        )
        for p in doc["params"]
    ]
    topo = NetworkTopology(
        layer_sizes=doc["layer_sizes"],
        recurrent=doc["recurrent"],
        ff_weights=[_decode_array(w) for w in doc["ff_weights"]],
        rec_weights=[None if w is None else _decode_array(w) for w in doc["rec_weights"]],
        params=params,
        v_init=[_decode_array(v) for v in doc["v_init"]],
        seed=doc["seed"],
    )
    return SpikingClassifier(topo, float.fromhex(doc["surrogate_slope"])), doc.get("extra", {})
