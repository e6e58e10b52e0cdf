"""Run configuration: INI sections mapped onto typed dataclasses.

Every key may be overridden with ``section.key=value`` strings, which is how
the command line's ``--set`` flag is applied.
"""

from __future__ import annotations

import configparser
import dataclasses
import os
import typing
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .curriculum import CurriculumMode
from .data import SyntheticKind
from .encoding import EncodingMode
from .spiking import V0Mode

__all__ = [
    "ConfigError",
    "DataSection",
    "EncoderSection",
    "NetworkSection",
    "NeuronSection",
    "CurriculumSection",
    "OptimizerSection",
    "ExperimentSection",
    "RunConfig",
    "load_config",
    "OUTPUT_DIR_ENV",
]

OUTPUT_DIR_ENV = "SPIKECL_OUTPUT_DIR"


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


@dataclass
class DataSection:
    source: str = "synthetic"  # synthetic | ucr | csv
    path: str = ""
    test_path: str = ""
    kind: str = "CbfLike"
    n_per_class: int = 30
    length: int = 128
    noise: Optional[float] = None
    label_noise: float = 0.0
    irregular_drop: float = 0.0
    noise_fraction: float = 0.0
    noise_snr_db: float = 20.0


@dataclass
class EncoderSection:
    mode: str = "Regional"
    intervals: int = 5
    cluster_size: int = 16
    gain: float = 1.0
    width_factor: float = 3.0

    @property
    def n_input(self) -> int:
        return self.intervals * self.cluster_size


@dataclass
class NetworkSection:
    hidden: list[int] = field(default_factory=lambda: [32])
    recurrent: bool = True
    mu_w: float = 0.3
    sigma_w: float = 3.0
    rec_scale: float = 1.0
    n_classes: int = 0  # 0 takes the class count from the data


@dataclass
class NeuronSection:
    tau_m: list[float] = field(default_factory=lambda: [20.0, 5.0])
    tau_s: list[float] = field(default_factory=lambda: [150.0, 10.0])
    tau: list[float] = field(default_factory=lambda: [20.0, 5.0])
    v_threshold: float = 1.0
    v0_mode: str = "paper"
    init_a: float = 20.0
    random_init: bool = True


@dataclass
class CurriculumSection:
    mode: str = "A2D"
    start_percent: float = 0.05
    step_length: int = 50
    warmup_epochs: int = 1


@dataclass
class OptimizerSection:
    learning_rate: float = 1e-2
    lr_decay: float = 0.5
    decay_every: int = 10
    surrogate_slope: float = 5.0
    epochs: int = 100
    batch_size: int = 1
    grad_clip: Optional[float] = None
    truncation: Optional[int] = None
    patience: int = 0  # 0 trains for all epochs; otherwise stop on a validation split
    val_fraction: float = 0.2


@dataclass
class ExperimentSection:
    seed: int = 0
    n_seeds: int = 1
    folds: int = 1
    test_fraction: float = 0.2
    output_dir: str = "results"
    baseline: bool = False
    jobs: int = 1


_SECTIONS = {
    "data": DataSection,
    "encoder": EncoderSection,
    "network": NetworkSection,
    "neuron": NeuronSection,
    "curriculum": CurriculumSection,
    "optimizer": OptimizerSection,
    "experiment": ExperimentSection,
}


@dataclass
class RunConfig:
    data: DataSection = field(default_factory=DataSection)
    encoder: EncoderSection = field(default_factory=EncoderSection)
    network: NetworkSection = field(default_factory=NetworkSection)
    neuron: NeuronSection = field(default_factory=NeuronSection)
    curriculum: CurriculumSection = field(default_factory=CurriculumSection)
    optimizer: OptimizerSection = field(default_factory=OptimizerSection)
    experiment: ExperimentSection = field(default_factory=ExperimentSection)
    overrides: list[str] = field(default_factory=list)

    @property
    def seeds(self) -> list[int]:
        return [self.experiment.seed + k for k in range(self.experiment.n_seeds)]

    @property
    def output_dir(self) -> Path:
        return Path(os.environ.get(OUTPUT_DIR_ENV) or self.experiment.output_dir)

    @property
    def v_init_high(self) -> float:
        """Upper end of the initial membrane draw, ``a + 1.8 * learning_rate``."""
        if not self.neuron.random_init:
            return 0.0
        return self.neuron.init_a + 1.8 * self.optimizer.learning_rate

    def validate(self) -> "RunConfig":
        """Cross-field checks; raises ``ConfigError`` naming the field."""
        checks = [
            ("data.source", self.data.source in ("synthetic", "ucr", "csv"), "must be synthetic, ucr or csv"),
            ("data.path", self.data.source == "synthetic" or bool(self.data.path), "required for file sources"),
            ("data.n_per_class", self.data.n_per_class >= 2, "need at least two samples per class"),
            ("data.length", self.data.length >= 1, "must be positive"),
            ("data.irregular_drop", 0.0 <= self.data.irregular_drop < 1.0, "must lie in [0, 1)"),
            ("data.noise_fraction", 0.0 <= self.data.noise_fraction <= 1.0, "must lie in [0, 1]"),
            ("encoder.intervals", self.encoder.intervals >= 1, "must be at least 1"),
            ("encoder.cluster_size", self.encoder.cluster_size >= 1, "must be at least 1"),
            ("encoder.gain", self.encoder.gain > 0, "must be positive"),
            ("encoder.width_factor", self.encoder.width_factor > 0, "must be positive"),
            ("network.hidden", all(h >= 1 for h in self.network.hidden), "layer widths must be positive"),
            ("network.sigma_w", self.network.sigma_w >= 0, "must be non-negative"),
            ("neuron.tau_m", len(self.neuron.tau_m) == 2, "give mean,std"),
            ("neuron.tau_s", len(self.neuron.tau_s) == 2, "give mean,std"),
            ("neuron.tau", len(self.neuron.tau) == 2, "give mean,std"),
            ("neuron.v_threshold", self.neuron.v_threshold > 0, "must be positive"),
            ("curriculum.start_percent", 0.0 < self.curriculum.start_percent <= 1.0, "must lie in (0, 1]"),
            ("curriculum.step_length", self.curriculum.step_length >= 1, "must be at least 1"),
            ("curriculum.warmup_epochs", self.curriculum.warmup_epochs >= 0, "must be non-negative"),
            ("optimizer.learning_rate", self.optimizer.learning_rate > 0, "must be positive"),
            ("optimizer.surrogate_slope", self.optimizer.surrogate_slope > 0, "must be positive"),
            ("optimizer.epochs", self.optimizer.epochs >= 0, "must be non-negative"),
            ("optimizer.batch_size", self.optimizer.batch_size >= 1, "must be at least 1"),
            ("optimizer.patience", self.optimizer.patience >= 0, "must be non-negative"),
            ("optimizer.val_fraction", 0.0 < self.optimizer.val_fraction < 1.0, "must lie in (0, 1)"),
            ("experiment.folds", self.experiment.folds >= 1, "must be at least 1"),
            ("experiment.n_seeds", self.experiment.n_seeds >= 1, "must be at least 1"),
            ("experiment.test_fraction", 0.0 < self.experiment.test_fraction < 1.0, "must lie in (0, 1)"),
            ("experiment.jobs", self.experiment.jobs >= 1, "must be at least 1"),
        ]
        for name, ok, why in checks:
            if not ok:
                raise ConfigError(f"{name}: {why}")
        for name, value, parse in (
            ("encoder.mode", self.encoder.mode, EncodingMode.parse),
            ("curriculum.mode", self.curriculum.mode, CurriculumMode.parse),
            ("neuron.v0_mode", self.neuron.v0_mode, V0Mode),
            ("data.kind", self.data.kind, SyntheticKind.parse),
        ):
            try:
                parse(value)
            except ValueError as exc:
                raise ConfigError(f"{name}: {exc}") from None
        return self

    def check_data(self, n_classes: int) -> None:
        if self.network.n_classes and self.network.n_classes != n_classes:
            raise ConfigError(
                f"network.n_classes: {self.network.n_classes} output neurons but the data has {n_classes} classes"
            )

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_ini(self) -> str:
        lines = []
        for name in _SECTIONS:
            lines.append(f"[{name}]")
            for f in dataclasses.fields(getattr(self, name)):
                lines.append(f"{f.name} = {_format(getattr(getattr(self, name), f.name))}")
            lines.append("")
        return "\n".join(lines)


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, list):
        return ", ".join(str(v) for v in value)
    return str(value)


def _coerce(raw: str, hint, where: str):
    origin = typing.get_origin(hint)
    args = typing.get_args(hint)
    if origin is typing.Union and type(None) in args:
        if raw.strip() == "" or raw.strip().lower() == "none":
            return None
        inner = next(a for a in args if a is not type(None))
        return _coerce(raw, inner, where)
    try:
        if origin is list:
            (inner,) = args
            return [_coerce(tok, inner, where) for tok in raw.split(",") if tok.strip()]
        if hint is bool:
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if hint is int:
            return int(raw.strip())
        if hint is float:
            return float(raw.strip())
        return raw.strip()
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _assign(config: RunConfig, section: str, key: str, raw: str) -> None:
    if section not in _SECTIONS:
        raise ConfigError(f"unknown section [{section}]")
    target = getattr(config, section)
    hints = typing.get_type_hints(type(target))
    if key not in hints:
        raise ConfigError(f"{section}.{key}: unknown key")
    setattr(target, key, _coerce(raw, hints[key], f"{section}.{key}"))


def load_config(path=None, overrides: Optional[list[str]] = None) -> RunConfig:
    """Read an INI file (optional), apply ``section.key=value`` overrides, validate.

    Relative data paths are resolved against the config file's directory.
    """
    config = RunConfig()
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        parser = configparser.ConfigParser(interpolation=None)
        try:
            parser.read(path)
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from None
        for section in parser.sections():
            for key, raw in parser.items(section):
                _assign(config, section, key, raw)
        for attr in ("path", "test_path"):
            value = getattr(config.data, attr)
            if value and not Path(value).is_absolute():
                setattr(config.data, attr, str(path.parent / value))
    for item in overrides or []:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override {item!r} must look like section.key=value")
        lhs, raw = item.split("=", 1)
        section, key = lhs.strip().split(".", 1)
        _assign(config, section, key, raw)
        config.overrides.append(item)
    return config.validate()
