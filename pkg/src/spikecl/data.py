"""Time-series datasets: ingestion, synthetic generators and perturbations."""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "DataError",
    "TimeSeriesSample",
    "Dataset",
    "load_ucr_tsv",
    "save_ucr_tsv",
    "load_multivariate_csv",
    "save_multivariate_csv",
    "SyntheticKind",
    "generate_synthetic",
    "normalize",
    "most_active",
    "inject_noise",
    "make_irregular",
]


class DataError(ValueError):
    """Malformed or inconsistent dataset input."""


@dataclass(frozen=True)
class TimeSeriesSample:
    """One labelled series: ``values`` is ``(T, D)``, ``timestamps`` is ``(T,)``."""

    values: np.ndarray
    label: int
    timestamps: Optional[np.ndarray] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2 or values.shape[0] < 1:
            raise DataError(f"values must be a non-empty (T, D) array, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DataError("values must be finite")
        ts = np.arange(values.shape[0], dtype=float) if self.timestamps is None else np.asarray(self.timestamps, dtype=float)
        if ts.shape != (values.shape[0],):
            raise DataError("need exactly one timestamp per observation")
        if ts.size > 1 and not np.all(np.diff(ts) > 0):
            raise DataError("timestamps must be strictly increasing")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "label", int(self.label))

    @property
    def length(self) -> int:
        return self.values.shape[0]

    @property
    def n_vars(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other):
        if not isinstance(other, TimeSeriesSample):
            return NotImplemented
        return (
            self.label == other.label
            and np.array_equal(self.values, other.values)
            and np.array_equal(self.timestamps, other.timestamps)
        )


@dataclass
class Dataset:
    samples: list[TimeSeriesSample]
    n_classes: int
    name: str = "dataset"
    class_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.samples:
            raise DataError("dataset is empty")
        labels = self.labels
        if labels.min() < 0 or labels.max() >= self.n_classes:
            raise DataError(f"labels must lie in [0, {self.n_classes})")

    def __len__(self):
        return len(self.samples)

    def __getitem__(self, idx):
        return self.samples[idx]

    @property
    def labels(self) -> np.ndarray:
        return np.array([s.label for s in self.samples], dtype=int)

    def subset(self, indices) -> "Dataset":
        return Dataset([self.samples[i] for i in indices], self.n_classes, self.name, list(self.class_names))

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.n_classes == other.n_classes and self.samples == other.samples


def _remap_labels(raw: Sequence[str], source: str) -> tuple[list[int], list[str]]:
    uniq = sorted(set(raw))
    try:
        uniq = sorted(uniq, key=float)
    except ValueError:
        pass
    lookup = {lab: i for i, lab in enumerate(uniq)}
    return [lookup[r] for r in raw], uniq


def _parse_float(token: str, where: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise DataError(f"{where}: cannot parse {token!r} as a number") from None
    if not np.isfinite(value):
        raise DataError(f"{where}: missing or non-finite value {token!r}")
    return value


def _label_token(token: str, where: str) -> str:
    token = token.strip()
    try:
        value = float(token)
    except ValueError:
        raise DataError(f"{where}: cannot parse label {token!r}") from None
    return str(int(value)) if value.is_integer() else repr(value)


def load_ucr_tsv(path) -> Dataset:
    """Read a UCR-archive TSV file: one series per line, label first."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"dataset file not found: {path}")
    raw_labels, rows = [], []
    length = None
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            tokens = line.rstrip("\n").split("\t")
            if len(tokens) < 2:
                raise DataError(f"{path}:{lineno}: expected a label followed by at least one value")
            where = f"{path}:{lineno}"
            values = [_parse_float(tok, where) for tok in tokens[1:]]
            if length is None:
                length = len(values)
            elif len(values) != length:
                raise DataError(f"{where}: series has {len(values)} values, earlier rows have {length}")
            raw_labels.append(_label_token(tokens[0], where))
            rows.append(values)
    if not rows:
        raise DataError(f"{path}: file contains no series")
    labels, names = _remap_labels(raw_labels, str(path))
    samples = [TimeSeriesSample(np.array(v), lab) for v, lab in zip(rows, labels)]
    return Dataset(samples, len(names), path.stem, names)


def save_ucr_tsv(dataset: Dataset, path) -> None:
    """Write a univariate dataset in UCR TSV layout with exact float reprs."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for s in dataset.samples:
            if s.n_vars != 1:
                raise DataError("UCR TSV holds univariate series only")
            fh.write("\t".join([str(s.label)] + [repr(float(v)) for v in s.values[:, 0]]) + "\n")


def load_multivariate_csv(paths) -> Dataset:
    """Read one series per CSV file.

    Each file has a header ``timestamp,<var_1>,...,<var_D>,label`` and one
    row per observation; the label must be constant within a file.  ``paths``
    may be a directory (all ``*.csv`` inside, sorted by name) or a list.
    """
    if isinstance(paths, (str, Path)) and Path(paths).is_dir():
        files = sorted(Path(paths).glob("*.csv"))
        name = Path(paths).name
    else:
        files = [Path(p) for p in ([paths] if isinstance(paths, (str, Path)) else paths)]
        name = files[0].stem if files else "dataset"
    if not files:
        raise DataError(f"no CSV files found in {paths}")
    series, raw_labels = [], []
    n_vars = None
    for f in files:
        if not f.exists():
            raise DataError(f"dataset file not found: {f}")
        with f.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if not header or header[0].strip().lower() != "timestamp" or header[-1].strip().lower() != "label":
                raise DataError(f"{f}: header must start with 'timestamp' and end with 'label'")
            d = len(header) - 2
            if d < 1:
                raise DataError(f"{f}: need at least one variable column")
            if n_vars is None:
                n_vars = d
            elif d != n_vars:
                raise DataError(f"{f}: has {d} variables, earlier files have {n_vars}")
            ts, vals, labs = [], [], set()
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != d + 2:
                    raise DataError(f"{f}:{lineno}: expected {d + 2} columns, got {len(row)}")
                where = f"{f}:{lineno}"
                ts.append(_parse_float(row[0], where))
                vals.append([_parse_float(tok, where) for tok in row[1:-1]])
                labs.add(row[-1].strip())
            if not vals:
                raise DataError(f"{f}: no observations")
            if len(labs) != 1:
                raise DataError(f"{f}: label must be constant within a series")
            series.append((np.array(ts), np.array(vals)))
            raw_labels.append(labs.pop())
    labels, names = _remap_labels(raw_labels, name)
    samples = [TimeSeriesSample(v, lab, t) for (t, v), lab in zip(series, labels)]
    return Dataset(samples, len(names), name, names)


def save_multivariate_csv(dataset: Dataset, directory) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    width = len(str(len(dataset)))
    out = []
    for i, s in enumerate(dataset.samples):
        p = directory / f"series_{i:0{width}d}.csv"
        with p.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["timestamp"] + [f"var{j + 1}" for j in range(s.n_vars)] + ["label"])
            for t, row in zip(s.timestamps, s.values):
                w.writerow([repr(float(t))] + [repr(float(v)) for v in row] + [s.label])
        out.append(p)
    return out


class SyntheticKind(str, enum.Enum):
    TWO_CLASS_FREQ = "TwoClassFreq"
    CBF_LIKE = "CbfLike"

    @classmethod
    def parse(cls, value) -> "SyntheticKind":
        if isinstance(value, cls):
            return value
        for kind in cls:
            if kind.value.lower() == str(value).lower():
                return kind
        raise DataError(f"unknown synthetic kind {value!r}")


def _two_class_freq(rng, n, t_len, noise, freqs=(2.0, 5.0)):
    t = np.arange(t_len) / t_len
    samples = []
    for label, f in enumerate(freqs):
        for _ in range(n):
            phase = rng.uniform(0, 2 * np.pi)
            amp = rng.uniform(0.8, 1.2)
            x = amp * np.sin(2 * np.pi * f * t + phase) + noise * rng.normal(size=t_len)
            samples.append(TimeSeriesSample(x, label))
    return samples


def _cbf_like(rng, n, t_len, noise):
    # Cylinder / bell / funnel shapes over a random window [a, b].
    t = np.arange(t_len, dtype=float)
    samples = []
    for label in range(3):
        for _ in range(n):
            a = rng.uniform(t_len / 8, t_len / 4)
            b = a + rng.uniform(t_len / 4, 3 * t_len / 4)
            b = min(b, t_len - 1)
            window = ((t >= a) & (t <= b)).astype(float)
            height = 6.0 + rng.normal()
            if label == 0:
                shape = window
            elif label == 1:
                shape = window * (t - a) / (b - a)
            else:
                shape = window * (b - t) / (b - a)
            samples.append(TimeSeriesSample(height * shape + noise * rng.normal(size=t_len), label))
    return samples


def generate_synthetic(
    kind,
    n: int,
    t_len: int,
    seed: Optional[int] = 0,
    noise: Optional[float] = None,
    label_noise: float = 0.0,
) -> Dataset:
    """Deterministic synthetic classification sets with ``n`` series per class.

    TwoClassFreq: sinusoids with 2 and 5 cycles per series, random phase and
    amplitude.  CbfLike: the classic cylinder/bell/funnel construction.
    ``noise`` is the std of additive white noise (default 0.1 and 1.0
    respectively); ``label_noise`` flips that fraction of labels to another
    class, which makes some samples systematically hard.
    """
    kind = SyntheticKind.parse(kind)
    if n < 2:
        raise DataError("need at least two series per class")
    rng = np.random.default_rng(seed)
    if kind is SyntheticKind.TWO_CLASS_FREQ:
        samples = _two_class_freq(rng, n, t_len, 0.1 if noise is None else noise)
        n_classes = 2
    else:
        samples = _cbf_like(rng, n, t_len, 1.0 if noise is None else noise)
        n_classes = 3
    if label_noise > 0:
        n_flip = int(round(label_noise * len(samples)))
        flip = rng.choice(len(samples), size=n_flip, replace=False)
        for i in flip:
            s = samples[i]
            new = (s.label + rng.integers(1, n_classes)) % n_classes
            samples[i] = TimeSeriesSample(s.values, new, s.timestamps)
    return Dataset(samples, n_classes, kind.value)


def normalize(dataset: Dataset, bounds: Optional[tuple[float, float]] = None) -> tuple[Dataset, tuple[float, float]]:
    """Min-max scale all values with one global range.

    ``bounds`` reuses a range fitted elsewhere (e.g. on the training fold);
    values outside it land outside [0, 1] and are clamped later by the encoder.
    """
    if bounds is None:
        lo = min(float(s.values.min()) for s in dataset.samples)
        hi = max(float(s.values.max()) for s in dataset.samples)
    else:
        lo, hi = bounds
    span = hi - lo if hi > lo else 1.0
    samples = [replace(s, values=(s.values - lo) / span) for s in dataset.samples]
    return Dataset(samples, dataset.n_classes, dataset.name, list(dataset.class_names)), (lo, hi)


def most_active(activity, fraction: float) -> np.ndarray:
    """Sorted indices of the top ``fraction`` of samples by score."""
    if not (0.0 < fraction <= 1.0):
        raise DataError("fraction must lie in (0, 1]")
    scores = np.asarray(getattr(activity, "scores", activity), dtype=float)
    n_top = int(round(fraction * scores.size))
    return np.sort(np.argsort(-scores, kind="stable")[:n_top])


def inject_noise(
    dataset: Dataset,
    fraction: float,
    snr_db: float,
    activity,
    seed: Optional[int] = 0,
) -> Dataset:
    """Add white Gaussian noise to the most active ``fraction`` of samples.

    ``activity`` holds one score per sample (a ``ScoreVector`` or an array).
    Noise variance per sample is its mean squared value over ``10**(snr/10)``.
    """
    scores = np.asarray(getattr(activity, "scores", activity), dtype=float)
    if scores.shape != (len(dataset),):
        raise DataError("activity must hold one score per sample")
    chosen = most_active(scores, fraction)
    rng = np.random.default_rng(seed)
    samples = list(dataset.samples)
    for i in chosen:
        s = samples[i]
        power = float(np.mean(s.values**2))
        var = power / 10.0 ** (snr_db / 10.0)
        noise = rng.normal(0.0, np.sqrt(var), size=s.values.shape)
        samples[i] = replace(s, values=s.values + noise)
    return Dataset(samples, dataset.n_classes, dataset.name, list(dataset.class_names))


def make_irregular(dataset: Dataset, drop_prob: float, seed: Optional[int] = 0) -> Dataset:
    """Drop each observation independently, always keeping the first one."""
    if not (0.0 <= drop_prob < 1.0):
        raise DataError("drop_prob must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    samples = []
    for s in dataset.samples:
        keep = rng.random(s.length) >= drop_prob
        keep[0] = True
        samples.append(TimeSeriesSample(s.values[keep], s.label, s.timestamps[keep]))
    return Dataset(samples, dataset.n_classes, dataset.name, list(dataset.class_names))
