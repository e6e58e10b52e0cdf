"""Experiment orchestration: folds, seeds, training orders, artifacts.

One *run* trains a fresh network on one fold with one seed and one training
order, then scores the held-out part.  Runs are independent and may execute
in worker processes; aggregation happens afterwards in the caller.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.stats import binomtest, poisson
from sklearn.model_selection import StratifiedKFold, train_test_split

from .baseline import DenseRNN, evaluate_dense, matched_hidden_size, raw_set, train_dense_epoch
from .config import RunConfig
from .curriculum import CurriculumMode, PacingConfig, build_schedule, score
from .data import (
    DataError,
    Dataset,
    generate_synthetic,
    inject_noise,
    load_multivariate_csv,
    load_ucr_tsv,
    make_irregular,
    normalize,
)
from .encoding import EncoderConfig, EncodingMode, encode_dataset, encoder_to_dict, fit_partition
from .learning import LossReport, OptimizerConfig, SpikingClassifier, evaluate, save_checkpoint, train_epoch
from .metrics import FiringStats, auc_ci, auc_roc
from .spiking import NetworkTopology, NeuronParams, simulate

__all__ = [
    "RunResult",
    "ExperimentReport",
    "OrderComparison",
    "TrainedRun",
    "FiringRateStudy",
    "load_dataset",
    "split_folds",
    "build_encoder",
    "build_model",
    "train_model",
    "run_experiment",
    "compare_orders",
    "noise_robustness",
    "sign_test",
    "firing_rate_study",
    "write_report",
    "read_report",
]

RESULT_COLUMNS = ["fold", "seed", "mode", "auc", "auc_ci_lo", "auc_ci_hi", "afp", "sparsity", "end_epoch", "seconds"]


@dataclass
class RunResult:
    fold: int
    seed: int
    mode: str
    model: str
    auc: float
    auc_ci: tuple[float, float]
    afp: float
    sparsity: float
    end_epoch: int
    seconds: float
    loss_curve: list[float] = field(default_factory=list)
    afp_curve: list[float] = field(default_factory=list)
    final_train_loss: float = float("nan")

    def row(self) -> dict:
        return {
            "fold": self.fold,
            "seed": self.seed,
            "mode": self.mode if self.model == "rsnn" else f"{self.model}:{self.mode}",
            "auc": self.auc,
            "auc_ci_lo": self.auc_ci[0],
            "auc_ci_hi": self.auc_ci[1],
            "afp": self.afp,
            "sparsity": self.sparsity,
            "end_epoch": self.end_epoch,
            "seconds": self.seconds,
        }

    def same_outcome(self, other: "RunResult") -> bool:
        """Equality ignoring wall-clock time."""
        a, b = asdict(self), asdict(other)
        a.pop("seconds")
        b.pop("seconds")
        return _nan_equal(a, b)


def _nan_equal(a, b) -> bool:
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(_nan_equal(a[k], b[k]) for k in a)
    if isinstance(a, (list, tuple)) and isinstance(b, (list, tuple)):
        return len(a) == len(b) and all(_nan_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, float) and isinstance(b, float) and math.isnan(a) and math.isnan(b):
        return True
    return a == b


@dataclass
class ExperimentReport:
    """Aggregated outcome of one configuration over folds and seeds."""

    mode: str
    runs: list[RunResult]
    config: dict = field(default_factory=dict)

    @property
    def aucs(self) -> np.ndarray:
        return np.array([r.auc for r in self.runs])

    @property
    def auc(self) -> float:
        return float(np.mean(self.aucs))

    @property
    def auc_std(self) -> float:
        return float(np.std(self.aucs))

    @property
    def auc_ci(self) -> tuple[float, float]:
        return (float(np.mean([r.auc_ci[0] for r in self.runs])), float(np.mean([r.auc_ci[1] for r in self.runs])))

    @property
    def firing(self) -> FiringStats:
        return FiringStats(
            float(np.mean([r.afp for r in self.runs])), float(np.mean([r.sparsity for r in self.runs]))
        )

    @property
    def loss_curve(self) -> list[float]:
        curves = [r.loss_curve for r in self.runs if r.loss_curve]
        if not curves:
            return []
        n = min(len(c) for c in curves)
        return list(np.mean([c[:n] for c in curves], axis=0))

    @property
    def seconds(self) -> float:
        return float(sum(r.seconds for r in self.runs))

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "auc": self.auc,
            "auc_std": self.auc_std,
            "auc_ci": list(self.auc_ci),
            "firing": self.firing.to_dict(),
            "loss_curve": self.loss_curve,
            "seconds": self.seconds,
            "runs": [asdict(r) for r in self.runs],
            "config": self.config,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentReport":
        runs = []
        for r in doc["runs"]:
            r = dict(r)
            r["auc_ci"] = tuple(r["auc_ci"])
            runs.append(RunResult(**r))
        return cls(doc["mode"], runs, doc.get("config", {}))

    def same_outcome(self, other: "ExperimentReport") -> bool:
        return (
            self.mode == other.mode
            and len(self.runs) == len(other.runs)
            and all(a.same_outcome(b) for a, b in zip(self.runs, other.runs))
        )


# ---------------------------------------------------------------- data


def load_dataset(config: RunConfig) -> tuple[Dataset, Optional[Dataset]]:
    """Training data plus the optional fixed test file."""
    d = config.data
    if d.source == "synthetic":
        noise_arg = {} if d.noise is None else {"noise": d.noise}
        ds = generate_synthetic(
            d.kind, d.n_per_class, d.length, seed=config.experiment.seed, label_noise=d.label_noise, **noise_arg
        )
        test = None
    else:
        loader = load_ucr_tsv if d.source == "ucr" else load_multivariate_csv
        ds = loader(_existing(d.path))
        test = loader(_existing(d.test_path)) if d.test_path else None
    if d.irregular_drop > 0:
        ds = make_irregular(ds, d.irregular_drop, seed=config.experiment.seed)
        if test is not None:
            test = make_irregular(test, d.irregular_drop, seed=config.experiment.seed + 1)
    config.check_data(ds.n_classes)
    return ds, test


def _existing(path: str) -> str:
    if not Path(path).exists():
        raise DataError(f"dataset file not found: {path}")
    return path


def split_folds(labels: np.ndarray, folds: int, seed: int, test_fraction: float = 0.2) -> list[tuple[np.ndarray, np.ndarray]]:
    """Stratified k-fold indices; ``folds=1`` is a single stratified hold-out."""
    labels = np.asarray(labels)
    idx = np.arange(labels.size)
    if folds == 1:
        tr, te = train_test_split(idx, test_size=test_fraction, stratify=labels, random_state=seed)
        return [(np.sort(tr), np.sort(te))]
    skf = StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed)
    return [(tr, te) for tr, te in skf.split(idx, labels)]


# ---------------------------------------------------------------- models


def build_encoder(config: RunConfig, train: Dataset) -> EncoderConfig:
    """Encoder over the normalised value range ``[0, 1]`` (population) or the
    training-set partition (regional)."""
    e = config.encoder
    if EncodingMode.parse(e.mode) is EncodingMode.REGIONAL:
        part = fit_partition(train, e.intervals, e.cluster_size)
        return EncoderConfig.regional(part, width_factor=e.width_factor, gain=e.gain)
    return EncoderConfig.population(e.n_input, 0.0, 1.0, width_factor=e.width_factor, gain=e.gain)


def build_model(config: RunConfig, n_classes: int, seed: int) -> SpikingClassifier:
    n, nn = config.network, config.neuron
    return SpikingClassifier.build(
        config.encoder.n_input,
        n.hidden,
        n_classes,
        recurrent_hidden=n.recurrent,
        seed=seed,
        surrogate_slope=config.optimizer.surrogate_slope,
        mu_w=n.mu_w,
        sigma_w=n.sigma_w,
        rec_scale=n.rec_scale,
        tau_m=tuple(nn.tau_m),
        tau_s=tuple(nn.tau_s),
        tau=tuple(nn.tau),
        v_threshold=nn.v_threshold,
        v0_mode=nn.v0_mode,
        v_init_high=config.v_init_high,
    )


def _optimizer(config: RunConfig, seed: int) -> OptimizerConfig:
    o = config.optimizer
    return OptimizerConfig(
        learning_rate=o.learning_rate,
        lr_decay=o.lr_decay,
        decay_every=o.decay_every,
        surrogate_slope=o.surrogate_slope,
        epochs=o.epochs,
        seed=seed,
        batch_size=o.batch_size,
        grad_clip=o.grad_clip,
        truncation=o.truncation,
    )


@dataclass
class TrainedRun:
    model: object
    loss_curve: list[float]
    afp_curve: list[float]
    score_history: list[np.ndarray]
    report: LossReport
    firing: Optional[FiringStats]
    encoder: Optional[EncoderConfig]
    bounds: tuple[float, float]


def _epoch_mode(mode: CurriculumMode, epoch: int, warmup: int) -> CurriculumMode:
    return CurriculumMode.RANDOM if epoch < warmup else mode


def train_model(
    config: RunConfig,
    train: Dataset,
    seed: int,
    mode,
    model_kind: str = "rsnn",
) -> TrainedRun:
    """Train one model on ``train`` under ``mode``.

    The first ``warmup_epochs`` epochs use a seeded random order; afterwards
    scores are recomputed at the start of every epoch from the per-sample
    losses of the previous evaluation pass.  The pacing index counts
    optimizer steps across epochs.

    With ``optimizer.patience > 0`` a stratified ``val_fraction`` of
    ``train`` is held out; training stops once the validation AUC (ties
    broken by validation loss) has not improved for ``patience`` epochs, and
    the best weights are restored.
    """
    mode = CurriculumMode.parse(mode)
    opt = _optimizer(config, seed)
    patience = config.optimizer.patience
    train_n, bounds = normalize(train)
    n_classes = train.n_classes
    val_data = None
    if patience > 0:
        fit_idx, val_idx = split_folds(train.labels, 1, seed, config.optimizer.val_fraction)[0]
        val_n = train_n.subset(val_idx)
        train_n = train_n.subset(fit_idx)
    if model_kind == "rsnn":
        encoder = build_encoder(config, train_n)
        data = encode_dataset(train_n, encoder)
        if patience > 0:
            val_data = encode_dataset(val_n, encoder)
        model = build_model(config, n_classes, seed)
        report, firing = evaluate(model, data)
    else:
        encoder = None
        data = raw_set(train_n)
        ref = build_model(config, n_classes, seed).topology
        n_params = sum(w.size for w in ref.weight_list())
        hidden = matched_hidden_size(n_params, data.x.shape[-1], n_classes)
        model = DenseRNN(data.x.shape[-1], hidden, n_classes, seed=seed)
        report, firing = evaluate_dense(model, data), None
        if patience > 0:
            val_data = raw_set(val_n)
    pacing = PacingConfig(config.curriculum.start_percent, config.curriculum.step_length, len(train_n))
    steps = math.ceil(len(train_n) / opt.batch_size)
    loss_curve, afp_curve, history = [], [], []
    best, best_state, stale = None, None, 0
    for epoch in range(opt.epochs):
        scores = score(report.per_sample_loss)
        schedule = build_schedule(
            scores,
            _epoch_mode(mode, epoch, config.curriculum.warmup_epochs),
            pacing,
            seed=seed * 100003 + epoch,
            start_step=epoch * steps,
            n_steps=steps,
            batch_size=opt.batch_size,
        )
        if model_kind == "rsnn":
            model, report, firing, _ = train_epoch(model, data, schedule, opt, epoch)
            afp_curve.append(firing.afp)
        else:
            model, report = train_dense_epoch(model, data, schedule, opt, epoch)
        history.append(scores.scores)
        loss_curve.append(report.mean_loss)
        if val_data is not None:
            key = _validation_key(model, val_data, model_kind)
            if best is None or key > best:
                best, best_state, stale = key, _state(model, model_kind), 0
            else:
                stale += 1
                if stale >= patience:
                    break
    if best_state is not None:
        _restore(model, model_kind, best_state)
        if model_kind == "rsnn":
            report, firing = evaluate(model, data)
        else:
            report = evaluate_dense(model, data)
    return TrainedRun(model, loss_curve, afp_curve, history, report, firing, encoder, bounds)


def _validation_key(model, val_data, model_kind: str) -> tuple[float, float]:
    report = evaluate(model, val_data)[0] if model_kind == "rsnn" else evaluate_dense(model, val_data)
    return auc_roc(report.probabilities, report.labels), -report.mean_loss


def _state(model, model_kind: str) -> list[np.ndarray]:
    params = model.weights() if model_kind == "rsnn" else model.params()
    return [p.copy() for p in params]


def _restore(model, model_kind: str, state: list[np.ndarray]) -> None:
    if model_kind == "rsnn":
        model.set_weights(state)
    else:
        model.set_params(state)


def _score_test(trained: TrainedRun, test: Dataset, model_kind: str):
    test_n, _ = normalize(test, trained.bounds)
    if model_kind == "rsnn":
        data = encode_dataset(test_n, trained.encoder)
        report, firing = evaluate(trained.model, data)
    else:
        report, firing = evaluate_dense(trained.model, raw_set(test_n)), FiringStats(0.0, 0.0)
    labels = report.labels
    auc = auc_roc(report.probabilities, labels)
    k = max(int(labels.max()) + 1, 2)
    n_pos = max(int(round(labels.size / k)), 1)
    return auc, auc_ci(auc, n_pos, max(labels.size - n_pos, 1)), firing


def _run_one(args) -> RunResult:
    config, ds, test, fold, tr, te, seed, mode, model_kind, save_dir = args
    start = time.perf_counter()
    train = ds.subset(tr)
    held = test if test is not None else ds.subset(te)
    try:
        trained = train_model(config, train, seed, mode, model_kind)
        auc, ci, firing = _score_test(trained, held, model_kind)
        if save_dir is not None and model_kind == "rsnn":
            Path(save_dir).mkdir(parents=True, exist_ok=True)
            save_checkpoint(
                trained.model,
                Path(save_dir) / f"model_{CurriculumMode.parse(mode).value}_fold{fold}_seed{seed}.json",
                extra={"encoder": encoder_to_dict(trained.encoder), "bounds": list(trained.bounds), "n_classes": train.n_classes},
            )
    except Exception as exc:
        exc.args = (f"fold {fold}, seed {seed}, mode {mode}: {exc}",) + exc.args[1:]
        raise
    return RunResult(
        fold=fold,
        seed=seed,
        mode=CurriculumMode.parse(mode).value,
        model=model_kind,
        auc=float(auc),
        auc_ci=(float(ci[0]), float(ci[1])),
        afp=float(firing.afp),
        sparsity=float(firing.sparsity_ratio),
        end_epoch=len(trained.loss_curve),
        seconds=time.perf_counter() - start,
        loss_curve=[float(v) for v in trained.loss_curve],
        afp_curve=[float(v) for v in trained.afp_curve],
        final_train_loss=float(trained.report.mean_loss),
    )


def _map(fn, tasks: list, jobs: int) -> list:
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def _tasks(config, ds, test, seeds, modes, model_kind="rsnn", save_dir=None) -> list:
    folds = split_folds(ds.labels, config.experiment.folds, config.experiment.seed, config.experiment.test_fraction)
    if test is not None:
        folds = [(np.arange(len(ds)), np.zeros(0, dtype=int))]
    tasks = []
    for mode in modes:
        for f, (tr, te) in enumerate(folds):
            for seed in seeds:
                tasks.append((config, ds, test, f, tr, te, seed, mode, model_kind, save_dir))
    return tasks


def run_experiment(config: RunConfig, output_dir=None, jobs: Optional[int] = None) -> ExperimentReport:
    """Train and score every (fold, seed) pair under the configured order.

    With ``output_dir`` the results CSV, summary JSON and loss curves are
    written there.
    """
    ds, test = load_dataset(config)
    mode = CurriculumMode.parse(config.curriculum.mode).value
    tasks = _tasks(config, ds, test, config.seeds, [mode], save_dir=output_dir)
    runs = _map(_run_one, tasks, jobs or config.experiment.jobs)
    report = ExperimentReport(mode, runs, config.to_dict())
    if output_dir is not None:
        write_report(report, output_dir)
    return report


def sign_test(a: Sequence[float], b: Sequence[float]) -> float:
    """One-sided paired sign test p-value for ``a > b``; ties are dropped."""
    diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    wins = int(np.sum(diff > 0))
    n = int(np.sum(diff != 0))
    if n == 0:
        return 1.0
    return float(binomtest(wins, n, 0.5, alternative="greater").pvalue)


@dataclass
class OrderComparison:
    """Per-mode reports paired by seed (and fold)."""

    reports: dict[str, ExperimentReport]
    baseline: dict[str, ExperimentReport] = field(default_factory=dict)

    def mean_auc(self, mode: str) -> float:
        return self.reports[mode].auc

    def paired(self, mode: str) -> np.ndarray:
        return self.reports[mode].aucs

    def sign_test(self, better: str, worse: str) -> float:
        return sign_test(self.paired(better), self.paired(worse))

    def to_dict(self) -> dict:
        return {
            "modes": {m: r.to_dict() for m, r in self.reports.items()},
            "baseline": {m: r.to_dict() for m, r in self.baseline.items()},
        }


def compare_orders(
    config: RunConfig,
    modes: Sequence[str] = ("A2D", "Random", "D2A"),
    seeds: Optional[Sequence[int]] = None,
    baseline_modes: Optional[Sequence[str]] = None,
    jobs: Optional[int] = None,
    output_dir=None,
) -> OrderComparison:
    """Train every mode on identical folds and seeds.

    ``baseline_modes`` adds the dense recurrent network under those orders
    (E2H/H2E/Random); by default it is included when the config asks for it.
    """
    if len(modes) < 2:
        raise ValueError("need at least two training orders to compare")
    seeds = list(config.seeds if seeds is None else seeds)
    modes = [CurriculumMode.parse(m).value for m in modes]
    if baseline_modes is None:
        baseline_modes = ["E2H", "H2E"] if config.experiment.baseline else []
    ds, test = load_dataset(config)
    tasks = _tasks(config, ds, test, seeds, modes)
    tasks += _tasks(config, ds, test, seeds, [CurriculumMode.parse(m).value for m in baseline_modes], "dense")
    runs = _map(_run_one, tasks, jobs or config.experiment.jobs)
    reports, base = {}, {}
    for run in runs:
        target = reports if run.model == "rsnn" else base
        target.setdefault(run.mode, ExperimentReport(run.mode, [], config.to_dict())).runs.append(run)
    comparison = OrderComparison(reports, base)
    if output_dir is not None:
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_rows(out / "results.csv", [r for rep in list(reports.values()) + list(base.values()) for r in rep.runs])
        (out / "comparison.json").write_text(json.dumps(comparison.to_dict(), indent=1) + "\n")
    return comparison


def _noise_run(args):
    config, train, seed, mode = args
    clean = train_model(config, train, seed, mode)
    ref_model = build_model(config, train.n_classes, seed)
    train_n, _ = normalize(train)
    ref_report, _ = evaluate(ref_model, encode_dataset(train_n, build_encoder(config, train_n)))
    noisy_ds = inject_noise(
        train, config.data.noise_fraction or 0.2, config.data.noise_snr_db, ref_report.activity, seed=seed
    )
    noisy = train_model(config, noisy_ds, seed, mode)
    return noisy.report.mean_loss - clean.report.mean_loss


def noise_robustness(
    config: RunConfig,
    seeds: Sequence[int],
    modes: Sequence[str] = ("A2D", "Random"),
    jobs: Optional[int] = None,
) -> dict[str, np.ndarray]:
    """Increase in final training loss caused by noise on the most active samples.

    Activity is measured with the freshly initialised network of each seed,
    so every order perturbs the same samples.  Returns one increase per seed
    for each mode.
    """
    ds, _ = load_dataset(config)
    tasks = [(config, ds, seed, CurriculumMode.parse(m).value) for m in modes for seed in seeds]
    out = _map(_noise_run, tasks, jobs or config.experiment.jobs)
    n = len(seeds)
    return {CurriculumMode.parse(m).value: np.array(out[i * n : (i + 1) * n]) for i, m in enumerate(modes)}


# ---------------------------------------------------------------- firing-rate study


@dataclass
class FiringRateStudy:
    mu_ext: np.ndarray
    rates: np.ndarray
    slope: float
    intercept: float
    r_squared: float


def firing_rate_study(
    mu_ext_grid: Sequence[float],
    *,
    n_neurons: int = 50,
    intervals: int = 5,
    cluster_size: int = 16,
    weight: float = 0.02,
    rec_scale: float = 0.0,
    steps: int = 600,
    burn_in: int = 200,
    tau_m: float = 20.0,
    tau_s: float = 150.0,
    tau: float = 20.0,
    v_threshold: float = 1.0,
    seed: int = 0,
) -> FiringRateStudy:
    """Mean firing rate of a layer fed by a regionally encoded Poisson source.

    At each step one cluster of input lines, picked uniformly at random, emits
    Poisson(``mu_ext``) spike counts per line; the other clusters are silent.
    Feedforward weights are positive around ``weight``; optional recurrent
    weights have zero mean and scale ``rec_scale``.  The rate is averaged over
    neurons and post-burn-in steps, and a least-squares line is fitted
    against ``mu_ext``.
    """
    grid = np.asarray(mu_ext_grid, dtype=float)
    if np.any(grid < 0):
        raise ValueError("mu_ext must be non-negative")
    rng = np.random.default_rng(seed)
    n_in = intervals * cluster_size
    ff = weight * rng.uniform(0.5, 1.5, size=(n_neurons, n_in))
    recurrent = rec_scale > 0
    rec = rng.normal(0.0, rec_scale / math.sqrt(n_neurons), size=(n_neurons, n_neurons)) if recurrent else None
    params = NeuronParams(tau_m=tau_m, tau_s=tau_s, tau=tau, v_threshold=v_threshold)
    topo = NetworkTopology([n_in, n_neurons], [recurrent], [ff], [rec], [params])
    active = rng.integers(0, intervals, size=steps)
    gate = (np.repeat(np.arange(intervals), cluster_size)[None, :] == active[:, None]).astype(float)
    base = rng.random((steps, n_in))
    rates = []
    for mu in grid:
        # Inverse-CDF draws from shared uniforms keep the inputs coupled across the grid.
        counts = poisson.ppf(base, mu) if mu > 0 else np.zeros_like(base)
        x = (counts * gate)[None]
        o = simulate(x, topo)[-1].o[0]
        rates.append(float(o[burn_in:].mean()))
    rates = np.array(rates)
    slope, intercept = np.polyfit(grid, rates, 1)
    fitted = slope * grid + intercept
    ss_res = float(np.sum((rates - fitted) ** 2))
    ss_tot = float(np.sum((rates - rates.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    return FiringRateStudy(grid, rates, float(slope), float(intercept), r2)


# ---------------------------------------------------------------- artifacts


def _write_rows(path: Path, runs: list[RunResult]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RESULT_COLUMNS)
        writer.writeheader()
        for r in runs:
            writer.writerow(r.row())


def write_report(report: ExperimentReport, output_dir) -> Path:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_rows(out / "results.csv", report.runs)
    (out / "summary.json").write_text(json.dumps(report.to_dict(), indent=1) + "\n")
    for r in report.runs:
        with (out / f"loss_{r.model}_{r.mode}_fold{r.fold}_seed{r.seed}.csv").open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["epoch", "train_loss", "afp"])
            for e, loss_value in enumerate(r.loss_curve):
                afp = r.afp_curve[e] if e < len(r.afp_curve) else ""
                writer.writerow([e, loss_value, afp])
    return out


def read_report(output_dir) -> ExperimentReport:
    return ExperimentReport.from_dict(json.loads((Path(output_dir) / "summary.json").read_text()))
