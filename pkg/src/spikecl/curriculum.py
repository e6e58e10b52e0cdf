"""Sample scoring, pacing and training-order schedules."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional

import numpy as np
from scipy.special import softmax

__all__ = [
    "CurriculumMode",
    "ScoreVector",
    "PacingConfig",
    "CurriculumSchedule",
    "score",
    "pace",
    "build_schedule",
    "export_schedule",
    "read_schedule",
]


class CurriculumMode(str, enum.Enum):
    """Training orders.

    A2D/D2A rank by activity score (highest first / lowest first).  E2H and
    H2E rank by loss, which under the softmax scoring is the same ranking, so
    E2H coincides with A2D and H2E with D2A; they exist as separate names for
    the non-spiking baseline.
    """

    A2D = "A2D"
    D2A = "D2A"
    RANDOM = "Random"
    E2H = "E2H"
    H2E = "H2E"

    @classmethod
    def parse(cls, value) -> "CurriculumMode":
        if isinstance(value, cls):
            return value
        for mode in cls:
            if mode.value.lower() == str(value).lower():
                return mode
        raise ValueError(f"unknown curriculum mode {value!r}; choose from {[m.value for m in cls]}")


@dataclass(frozen=True)
class ScoreVector:
    scores: np.ndarray
    source_losses: np.ndarray

    def __len__(self):
        return len(self.scores)


def score(losses) -> ScoreVector:
    """Softmax of the negated per-sample losses."""
    losses = np.asarray(losses, dtype=float)
    if losses.ndim != 1 or losses.size == 0:
        raise ValueError("losses must be a non-empty vector")
    if not np.all(np.isfinite(losses)):
        raise ValueError("losses must be finite")
    return ScoreVector(softmax(-losses), losses.copy())


@dataclass(frozen=True)
class PacingConfig:
    start_percent: float = 0.05
    step_length: int = 50
    n_samples: int = 1

    def __post_init__(self):
        if not (0.0 < self.start_percent <= 1.0):
            raise ValueError("start_percent must lie in (0, 1]")
        if self.step_length < 1:
            raise ValueError("step_length must be at least 1")
        if self.start_percent * self.n_samples < 1:
            raise ValueError("start_percent * n_samples must be at least one sample")


def pace(m: int, config: PacingConfig) -> int:
    """Subset size at training step ``m``: stepwise linear growth capped at N."""
    if m < 0:
        raise ValueError("training step must be non-negative")
    frac = min(config.start_percent * (1 + m // config.step_length), 1.0)
    # Guard against 0.07 * 100 = 7.000000000000001 style rounding.
    return max(1, int(math.floor(frac * config.n_samples + 1e-9)))


@dataclass
class CurriculumSchedule:
    """Sample order plus the pool size for each training step.

    Step ``k`` trains on a mini-batch drawn from ``order[:sizes[k]]``.  With
    ``batch_size`` unset the mini-batch is that whole prefix; otherwise
    consecutive chunks of the prefix are taken in order, wrapping around.
    """

    order: np.ndarray
    sizes: np.ndarray
    mode: CurriculumMode
    scores: Optional[np.ndarray] = None
    batch_size: Optional[int] = None
    start_step: int = 0

    def __post_init__(self):
        self.order = np.asarray(self.order, dtype=int)
        self.sizes = np.asarray(self.sizes, dtype=int)
        n = self.order.size
        if not np.array_equal(np.sort(self.order), np.arange(n)):
            raise ValueError("order must be a permutation of 0..N-1")
        if self.sizes.size and (np.any(np.diff(self.sizes) < 0) or self.sizes.min() < 1 or self.sizes.max() > n):
            raise ValueError("sizes must be non-decreasing within [1, N]")

    @property
    def n_steps(self) -> int:
        return int(self.sizes.size)

    def batches(self) -> Iterator[np.ndarray]:
        cursor = 0
        for size in self.sizes:
            pool = self.order[:size]
            if self.batch_size is None or self.batch_size >= size:
                yield pool
                continue
            idx = (cursor + np.arange(self.batch_size)) % size
            cursor = int((cursor + self.batch_size) % size)
            yield pool[idx]


def build_schedule(
    scores: Optional[ScoreVector],
    mode,
    config: PacingConfig,
    seed: Optional[int] = None,
    *,
    start_step: int = 0,
    n_steps: Optional[int] = None,
    batch_size: Optional[int] = None,
) -> CurriculumSchedule:
    """Order samples by ``mode`` and attach pacing sizes.

    Ties keep the original index order.  ``n_steps`` defaults to the number of
    steps the pacing needs to reach the full set, and step ``k`` of the
    schedule uses ``pace(start_step + k)``.
    """
    mode = CurriculumMode.parse(mode)
    n = config.n_samples
    if mode is CurriculumMode.RANDOM:
        order = np.random.default_rng(seed).permutation(n)
    else:
        if scores is None:
            raise ValueError(f"{mode.value} ordering needs scores")
        p = np.asarray(scores.scores, dtype=float)
        if p.size != n:
            raise ValueError("scores do not match the pacing sample count")
        if mode in (CurriculumMode.A2D, CurriculumMode.E2H):
            order = np.argsort(-p, kind="stable")
        else:
            order = np.argsort(p, kind="stable")
    if n_steps is None:
        stages = math.ceil(1.0 / config.start_percent)
        n_steps = max(stages * config.step_length - start_step, 1)
    sizes = np.array([pace(start_step + k, config) for k in range(n_steps)], dtype=int)
    return CurriculumSchedule(
        order=order,
        sizes=sizes,
        mode=mode,
        scores=None if scores is None else np.asarray(scores.scores),
        batch_size=batch_size,
        start_step=start_step,
    )


def export_schedule(schedule: CurriculumSchedule, path) -> None:
    """Write a tab-separated audit listing.

    One line per sample in training order (``rank, index, score``) followed by
    one line per step (``step, size``).
    """
    lines = [f"# mode\t{schedule.mode.value}", "# rank\tindex\tscore"]
    for rank, idx in enumerate(schedule.order):
        s = "nan" if schedule.scores is None else repr(float(schedule.scores[idx]))
        lines.append(f"{rank}\t{idx}\t{s}")
    lines.append("# step\tsize")
    for k, size in enumerate(schedule.sizes):
        lines.append(f"{schedule.start_step + k}\t{size}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_schedule(path) -> CurriculumSchedule:
    order, scores, steps, sizes = [], [], [], []
    mode = None
    section = None
    for line in Path(path).read_text().splitlines():
        if line.startswith("# mode"):
            mode = line.split("\t")[1]
        elif line.startswith("# rank"):
            section = "order"
        elif line.startswith("# step"):
            section = "sizes"
        elif line.strip():
            parts = line.split("\t")
            if section == "order":
                order.append(int(parts[1]))
                scores.append(float(parts[2]))
            else:
                steps.append(int(parts[0]))
                sizes.append(int(parts[1]))
    score_arr = np.empty(len(order))
    score_arr[np.array(order, dtype=int)] = scores
    return CurriculumSchedule(
        order=np.array(order),
        sizes=np.array(sizes),
        mode=CurriculumMode.parse(mode),
        scores=None if np.all(np.isnan(score_arr)) else score_arr,
        start_step=steps[0] if steps else 0,
    )
