"""Spike encoders for real-valued series.

Encoder neurons are non-leaky integrate-and-fire units fed by Gaussian
tuning curves: neuron ``j`` receives current
``gain_j * exp(-(x - center_j)^2 / (2 width_j^2))`` per observation, fires
when its potential reaches ``threshold`` and resets to zero.

In regional mode the value range is cut into ``M`` intervals, each owned by
a cluster of neurons whose tuning centres tile that interval; at each step
only the cluster containing the observed value is driven.  Undriven
neurons keep their potential.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .data import DataError, Dataset, TimeSeriesSample
from .spiking import SpikeTensor

__all__ = [
    "EncodingMode",
    "ValuePartition",
    "EncoderConfig",
    "EncodedSet",
    "fit_partition",
    "encode_population",
    "encode_regional",
    "encode",
    "encode_dataset",
    "drive_mask",
    "reduce_variables",
    "encoder_to_dict",
    "encoder_from_dict",
]


class EncodingMode(str, enum.Enum):
    POPULATION = "Population"
    REGIONAL = "Regional"

    @classmethod
    def parse(cls, value) -> "EncodingMode":
        if isinstance(value, cls):
            return value
        for mode in cls:
            if mode.value.lower() == str(value).lower():
                return mode
        raise ValueError(f"unknown encoding mode {value!r}")


@dataclass(frozen=True)
class ValuePartition:
    """Equal-width intervals ``[b_k, b_{k+1})``; the last one is closed."""

    boundaries: np.ndarray
    cluster_size: int

    def __post_init__(self):
        b = np.asarray(self.boundaries, dtype=float)
        if b.ndim != 1 or b.size < 2:
            raise ValueError("need at least two boundaries")
        if not np.all(np.diff(b) > 0):
            raise ValueError("boundaries must be strictly increasing")
        if self.cluster_size < 1:
            raise ValueError("cluster_size must be positive")
        object.__setattr__(self, "boundaries", b)

    @property
    def m_intervals(self) -> int:
        return self.boundaries.size - 1

    @property
    def n_input(self) -> int:
        return self.m_intervals * self.cluster_size

    def interval_of(self, x) -> np.ndarray:
        """Interval index per value; out-of-range values clamp to the end intervals."""
        idx = np.searchsorted(self.boundaries, np.asarray(x, dtype=float), side="right") - 1
        return np.clip(idx, 0, self.m_intervals - 1)


def reduce_variables(values: np.ndarray) -> np.ndarray:
    """Collapse a ``(T, D)`` block to one value per step (mean over variables)."""
    values = np.asarray(values, dtype=float)
    return values if values.ndim == 1 else values.mean(axis=-1)


def fit_partition(dataset: Sequence[TimeSeriesSample] | Dataset, m: int, cluster_size: int, n_input: Optional[int] = None) -> ValuePartition:
    """Equal-width partition of the global value range of ``dataset``."""
    samples = list(dataset.samples if isinstance(dataset, Dataset) else dataset)
    if not samples:
        raise DataError("cannot fit a partition on an empty dataset")
    if m < 1:
        raise ValueError("need at least one interval")
    if n_input is not None and m * cluster_size != n_input:
        raise ValueError(f"{m} intervals x {cluster_size} neurons != n_input {n_input}")
    reduced = [reduce_variables(s.values) for s in samples]
    lo = min(float(r.min()) for r in reduced)
    hi = max(float(r.max()) for r in reduced)
    if not hi > lo:
        raise DataError("all values are equal; a value partition is meaningless here, use M=1 and population encoding")
    return ValuePartition(np.linspace(lo, hi, m + 1), cluster_size)


@dataclass(frozen=True)
class EncoderConfig:
    """Tuning curves plus the optional value partition.

    Use :meth:`population` or :meth:`regional` to build one with evenly
    spaced centres.  ``cluster_of`` maps each neuron to its interval (regional
    mode only).
    """

    n_input: int
    mode: EncodingMode
    centers: np.ndarray
    widths: np.ndarray
    gains: np.ndarray
    partition: Optional[ValuePartition] = None
    threshold: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "mode", EncodingMode.parse(self.mode))
        for name in ("centers", "widths", "gains"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (self.n_input,):
                raise ValueError(f"{name} must have one entry per encoder neuron")
            object.__setattr__(self, name, arr)
        if self.mode is EncodingMode.REGIONAL:
            if self.partition is None:
                raise ValueError("regional mode needs a value partition")
            if self.partition.m_intervals > self.n_input or self.partition.n_input != self.n_input:
                raise ValueError("partition clusters must tile the encoder neurons exactly")
        if np.any(self.widths <= 0) or self.threshold <= 0:
            raise ValueError("widths and threshold must be positive")

    @property
    def cluster_of(self) -> Optional[np.ndarray]:
        if self.partition is None:
            return None
        return np.repeat(np.arange(self.partition.m_intervals), self.partition.cluster_size)

    @classmethod
    def population(
        cls,
        n_input: int,
        lo: float = 0.0,
        hi: float = 1.0,
        width_factor: float = 1.0,
        gain: float = 0.5,
        threshold: float = 1.0,
    ) -> "EncoderConfig":
        spacing = (hi - lo) / n_input
        centers = lo + (np.arange(n_input) + 0.5) * spacing
        return cls(
            n_input,
            EncodingMode.POPULATION,
            centers,
            np.full(n_input, width_factor * spacing),
            np.full(n_input, float(gain)),
            threshold=threshold,
        )

    @classmethod
    def regional(
        cls,
        partition: ValuePartition,
        width_factor: float = 1.0,
        gain: float = 0.5,
        threshold: float = 1.0,
    ) -> "EncoderConfig":
        b = partition.boundaries
        k = partition.cluster_size
        spacing = np.repeat(np.diff(b) / k, k)
        starts = np.repeat(b[:-1], k)
        offsets = np.tile(np.arange(k) + 0.5, partition.m_intervals)
        return cls(
            partition.n_input,
            EncodingMode.REGIONAL,
            starts + offsets * spacing,
            width_factor * spacing,
            np.full(partition.n_input, float(gain)),
            partition=partition,
            threshold=threshold,
        )


def _currents(x: np.ndarray, config: EncoderConfig) -> np.ndarray:
    z = (x[..., None] - config.centers) / config.widths
    return config.gains * np.exp(-0.5 * z * z)


def drive_mask(x, config: EncoderConfig) -> np.ndarray:
    """Boolean ``(..., n_input)`` mask of neurons eligible for drive at each step."""
    x = np.asarray(x, dtype=float)
    if config.mode is EncodingMode.POPULATION:
        return np.ones(x.shape + (config.n_input,), dtype=bool)
    return config.partition.interval_of(x)[..., None] == config.cluster_of


def _integrate_and_fire(current: np.ndarray, threshold: float) -> np.ndarray:
    # current: (..., T, n); integrate over T.
    v = np.zeros(current.shape[:-2] + current.shape[-1:])
    out = np.zeros(current.shape, dtype=np.uint8)
    for t in range(current.shape[-2]):
        v += current[..., t, :]
        fired = v >= threshold
        out[..., t, :] = fired
        v[fired] = 0.0
    return out


def _encode_values(x: np.ndarray, config: EncoderConfig) -> np.ndarray:
    current = _currents(x, config)
    if config.mode is EncodingMode.REGIONAL:
        current = current * drive_mask(x, config)
    return _integrate_and_fire(current, config.threshold)


def _sample_values(sample: TimeSeriesSample) -> np.ndarray:
    x = reduce_variables(sample.values)
    if x.size == 0:
        raise DataError("cannot encode an empty series")
    return x


def encode_population(sample: TimeSeriesSample, config: EncoderConfig) -> SpikeTensor:
    if config.mode is not EncodingMode.POPULATION:
        raise ValueError("encoder is not configured for population mode")
    return SpikeTensor(_encode_values(_sample_values(sample), config), sample.timestamps)


def encode_regional(sample: TimeSeriesSample, config: EncoderConfig) -> SpikeTensor:
    if config.mode is not EncodingMode.REGIONAL:
        raise ValueError("encoder is not configured for regional mode")
    return SpikeTensor(_encode_values(_sample_values(sample), config), sample.timestamps)


def encode(sample: TimeSeriesSample, config: EncoderConfig) -> SpikeTensor:
    if config.mode is EncodingMode.REGIONAL:
        return encode_regional(sample, config)
    return encode_population(sample, config)


@dataclass
class EncodedSet:
    """A padded batch of encoded series ready for the network.

    ``x`` is ``(N, T, n_input)``, ``dt`` and ``mask`` are ``(N, T)``; padded
    steps carry no input, ``dt = 1`` and ``mask = 0``.
    """

    x: np.ndarray
    dt: np.ndarray
    mask: np.ndarray
    labels: np.ndarray

    def __len__(self):
        return self.x.shape[0]

    def subset(self, idx) -> "EncodedSet":
        idx = np.asarray(idx, dtype=int)
        return EncodedSet(self.x[idx], self.dt[idx], self.mask[idx], self.labels[idx])

    @property
    def regular(self) -> bool:
        return bool(np.all(self.dt == 1.0) and np.all(self.mask == 1.0))


def encode_dataset(dataset: Dataset, config: EncoderConfig) -> EncodedSet:
    """Encode every sample, padding to the longest series."""
    lengths = [s.length for s in dataset.samples]
    T = max(lengths)
    N = len(dataset)
    values = np.zeros((N, T))
    dt = np.ones((N, T))
    mask = np.zeros((N, T))
    for i, s in enumerate(dataset.samples):
        n = s.length
        values[i, :n] = _sample_values(s)
        if n > 1:
            dt[i, 1:n] = np.diff(s.timestamps)
        mask[i, :n] = 1.0
    spikes = _encode_values(values, config).astype(float)
    spikes *= mask[..., None]
    return EncodedSet(spikes, dt, mask, dataset.labels)


def encoder_to_dict(config: EncoderConfig) -> dict:
    """JSON-ready description; floats keep their exact values."""
    doc = {
        "n_input": config.n_input,
        "mode": config.mode.value,
        "centers": [float(v) for v in config.centers],
        "widths": [float(v) for v in config.widths],
        "gains": [float(v) for v in config.gains],
        "threshold": float(config.threshold),
    }
    if config.partition is not None:
        doc["boundaries"] = [float(v) for v in config.partition.boundaries]
        doc["cluster_size"] = config.partition.cluster_size
    return doc


def encoder_from_dict(doc: dict) -> EncoderConfig:
    partition = None
    if "boundaries" in doc:
        partition = ValuePartition(np.array(doc["boundaries"]), int(doc["cluster_size"]))
    return EncoderConfig(
        int(doc["n_input"]),
        doc["mode"],
        np.array(doc["centers"]),
        np.array(doc["widths"]),
        np.array(doc["gains"]),
        partition=partition,
        threshold=float(doc["threshold"]),
    )
