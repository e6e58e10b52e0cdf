"""Discrete-time recurrent LIF simulation.

Each layer keeps two exponential traces per presynaptic line (a slow one,
``M``, decaying with ``tau_m`` and a fast one, ``H``, decaying with
``tau_s``), so the post-synaptic potential of a line is
``V0 * (M - H)``: the difference-of-exponentials kernel evaluated
incrementally.  A reset trace ``R`` (decay ``tau``) accumulates the neuron's
own past spikes and is subtracted, scaled by the threshold, from the drive.

All state arrays carry arbitrary leading batch dimensions; the last axis is
the neuron (or presynaptic line) axis.
"""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

__all__ = [
    "SimulationError",
    "NonFiniteStateError",
    "V0Mode",
    "NeuronParams",
    "SpikeTensor",
    "LayerState",
    "NetworkTopology",
    "LayerRecord",
    "init_state",
    "step_layer",
    "decay_to",
    "simulate",
    "run_network",
    "Theorem1Result",
    "theorem1_demo",
]

_TAU_EPS = 1e-6


class SimulationError(ValueError):
    """Invalid shapes or parameters passed to the simulator."""


class NonFiniteStateError(FloatingPointError):
    """A NaN or Inf appeared in the neuron state."""

    def __init__(self, message: str, layer: Optional[int] = None, neuron: Optional[int] = None, step: Optional[int] = None):
        super().__init__(message)
        self.layer = layer
        self.neuron = neuron
        self.step = step


class V0Mode(str, enum.Enum):
    PAPER_FORMULA = "paper"
    EXACT_PEAK = "exact"


def _kernel_bracket(t, tau_m, tau_s):
    return np.exp(-t / tau_m) - np.exp(-t / tau_s)


@dataclass(frozen=True)
class NeuronParams:
    """Time constants, threshold and kernel normaliser of one layer.

    ``tau_m`` and ``tau_s`` may come in either order; the two only have to
    differ so the PSP kernel does not vanish.
    """

    tau_m: float = 20.0
    tau_s: float = 150.0
    tau: float = 20.0
    v_threshold: float = 1.0
    v0_mode: V0Mode = V0Mode.PAPER_FORMULA
    dt: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "v0_mode", V0Mode(self.v0_mode))
        for name in ("tau_m", "tau_s", "tau", "v_threshold", "dt"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise SimulationError(f"{name} must be positive and finite, got {value!r}")
        if abs(self.tau_m - self.tau_s) <= _TAU_EPS:
            raise SimulationError("tau_m and tau_s must differ, the PSP kernel is degenerate otherwise")

    @property
    def alpha(self) -> float:
        return float(np.exp(-self.dt / self.tau_m))

    @property
    def beta(self) -> float:
        return float(np.exp(-self.dt / self.tau_s))

    @property
    def gamma(self) -> float:
        return float(np.exp(-self.dt / self.tau))

    @property
    def eta(self) -> float:
        return self.tau_m / self.tau_s

    @property
    def v0(self) -> float:
        if self.v0_mode is V0Mode.PAPER_FORMULA:
            return self.eta / (self.eta - 1.0)
        # Continuous-time kernel extremum, found numerically.
        hi = 20.0 * max(self.tau_m, self.tau_s)
        res = minimize_scalar(
            lambda t: -abs(_kernel_bracket(t, self.tau_m, self.tau_s)),
            bounds=(0.0, hi),
            method="bounded",
            options={"xatol": 1e-10},
        )
        return float(1.0 / _kernel_bracket(res.x, self.tau_m, self.tau_s))

    def kernel(self, t) -> np.ndarray:
        """PSP kernel ``K(t)`` for ``t >= 0``."""
        return self.v0 * _kernel_bracket(np.asarray(t, dtype=float), self.tau_m, self.tau_s)

    def decay_factors(self, dt) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        dt = np.asarray(dt, dtype=float)
        return np.exp(-dt / self.tau_m), np.exp(-dt / self.tau_s), np.exp(-dt / self.tau)

    def replace(self, **changes) -> "NeuronParams":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class SpikeTensor:
    """Binary spike raster of shape ``(steps, neurons)``."""

    spikes: np.ndarray
    timestamps: Optional[np.ndarray] = None

    def __post_init__(self):
        spikes = np.asarray(self.spikes)
        if spikes.ndim != 2:
            raise SimulationError(f"spikes must be 2-D (steps, neurons), got shape {spikes.shape}")
        if spikes.size and not np.all((spikes == 0) | (spikes == 1)):
            raise SimulationError("spike entries must be 0 or 1")
        object.__setattr__(self, "spikes", spikes.astype(np.uint8))
        if self.timestamps is not None:
            ts = np.asarray(self.timestamps, dtype=float)
            if ts.shape != (spikes.shape[0],):
                raise SimulationError("timestamps must have one entry per step")
            if ts.size > 1 and not np.all(np.diff(ts) > 0):
                raise SimulationError("timestamps must be strictly increasing")
            object.__setattr__(self, "timestamps", ts)

    @property
    def steps(self) -> int:
        return self.spikes.shape[0]

    @property
    def neurons(self) -> int:
        return self.spikes.shape[1]

    def step_sizes(self) -> Optional[np.ndarray]:
        """Elapsed time before each step; the first step counts as one unit."""
        if self.timestamps is None:
            return None
        dt = np.empty(self.steps)
        if self.steps:
            dt[0] = 1.0
            dt[1:] = np.diff(self.timestamps)
        return dt

    def __eq__(self, other):
        if not isinstance(other, SpikeTensor):
            return NotImplemented
        same_ts = (self.timestamps is None and other.timestamps is None) or (
            self.timestamps is not None
            and other.timestamps is not None
            and np.array_equal(self.timestamps, other.timestamps)
        )
        return same_ts and np.array_equal(self.spikes, other.spikes)


@dataclass(frozen=True)
class LayerState:
    """Traces of one layer.

    ``m_trace``/``h_trace`` are indexed by presynaptic line (feedforward lines
    first, then the layer's own neurons when it is recurrent); the remaining
    fields are indexed by neuron.
    """

    m_trace: np.ndarray
    h_trace: np.ndarray
    r_trace: np.ndarray
    v_membrane: np.ndarray
    o_output: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, LayerState):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, f.name), getattr(other, f.name)) for f in dataclasses.fields(self)
        )


@dataclass
class NetworkTopology:
    """Layer sizes, weights and per-layer neuron parameters.

    ``layer_sizes[0]`` is the input width; every later entry is a spiking
    layer.  ``ff_weights[l]`` has shape ``(layer_sizes[l+1], layer_sizes[l])``
    and ``rec_weights[l]`` is either ``None`` or square.
    """

    layer_sizes: list[int]
    recurrent: list[bool]
    ff_weights: list[np.ndarray]
    rec_weights: list[Optional[np.ndarray]]
    params: list[NeuronParams]
    v_init: list[np.ndarray] = field(default_factory=list)
    seed: Optional[int] = None

    def __post_init__(self):
        n_layers = len(self.layer_sizes) - 1
        if n_layers < 1:
            raise SimulationError("need an input width and at least one spiking layer")
        if not (len(self.recurrent) == len(self.ff_weights) == len(self.rec_weights) == len(self.params) == n_layers):
            raise SimulationError("per-layer lists must all have one entry per spiking layer")
        for l in range(n_layers):
            n_pre, n = self.layer_sizes[l], self.layer_sizes[l + 1]
            if self.ff_weights[l].shape != (n, n_pre):
                raise SimulationError(
                    f"layer {l}: feedforward weights have shape {self.ff_weights[l].shape}, expected {(n, n_pre)}"
                )
            rec = self.rec_weights[l]
            if self.recurrent[l]:
                if rec is None or rec.shape != (n, n):
                    raise SimulationError(f"layer {l}: recurrent weights must be square of size {n}")
            elif rec is not None:
                raise SimulationError(f"layer {l}: non-recurrent layer carries recurrent weights")
        if not self.v_init:
            self.v_init = [np.zeros(n) for n in self.layer_sizes[1:]]
        elif [v.shape for v in self.v_init] != [(n,) for n in self.layer_sizes[1:]]:
            raise SimulationError("v_init must hold one vector per spiking layer")

    @property
    def n_layers(self) -> int:
        return len(self.layer_sizes) - 1

    def fan_in(self, layer: int) -> int:
        n_pre = self.layer_sizes[layer]
        return n_pre + (self.layer_sizes[layer + 1] if self.recurrent[layer] else 0)

    def combined_weights(self, layer: int) -> np.ndarray:
        if self.recurrent[layer]:
            return np.hstack([self.ff_weights[layer], self.rec_weights[layer]])
        return self.ff_weights[layer]

    def weight_list(self) -> list[np.ndarray]:
        out = []
        for l in range(self.n_layers):
            out.append(self.ff_weights[l])
            if self.recurrent[l]:
                out.append(self.rec_weights[l])
        return out

    def copy(self) -> "NetworkTopology":
        return NetworkTopology(
            layer_sizes=list(self.layer_sizes),
            recurrent=list(self.recurrent),
            ff_weights=[w.copy() for w in self.ff_weights],
            rec_weights=[None if w is None else w.copy() for w in self.rec_weights],
            params=list(self.params),
            v_init=[v.copy() for v in self.v_init],
            seed=self.seed,
        )

    @classmethod
    def random(
        cls,
        layer_sizes: Sequence[int],
        recurrent: Sequence[bool] | bool = True,
        *,
        mu_w: float = 0.0,
        sigma_w: float = 1.0,
        rec_scale: float = 1.0,
        tau_m: tuple[float, float] = (20.0, 5.0),
        tau_s: tuple[float, float] = (150.0, 10.0),
        tau: tuple[float, float] = (20.0, 5.0),
        v_threshold: float = 1.0,
        v0_mode: V0Mode | str = V0Mode.PAPER_FORMULA,
        v_init_high: float = 0.0,
        seed: Optional[int] = None,
    ) -> "NetworkTopology":
        """Gaussian weights ``N(mu_w, sigma_w^2) / sqrt(fan_in)``.

        Time constants are drawn once per layer from ``N(mean, std)`` and
        clamped to at least one step.  ``v_init_high > 0`` draws the initial
        membrane uniformly from ``[0, v_init_high]``.
        """
        rng = np.random.default_rng(seed)
        layer_sizes = [int(n) for n in layer_sizes]
        n_layers = len(layer_sizes) - 1
        if isinstance(recurrent, bool):
            recurrent = [recurrent] * n_layers
        recurrent = list(recurrent)
        ff, rec, params, v_init = [], [], [], []
        for l in range(n_layers):
            n_pre, n = layer_sizes[l], layer_sizes[l + 1]
            fan = n_pre + (n if recurrent[l] else 0)
            scale = 1.0 / np.sqrt(fan)
            ff.append(rng.normal(mu_w, sigma_w, size=(n, n_pre)) * scale)
            rec.append(rng.normal(mu_w, sigma_w, size=(n, n)) * scale * rec_scale if recurrent[l] else None)
            tm, ts, tr = (max(1.0, rng.normal(*spec)) for spec in (tau_m, tau_s, tau))
            if abs(tm - ts) <= _TAU_EPS:
                ts = tm + 1.0
            params.append(NeuronParams(tau_m=tm, tau_s=ts, tau=tr, v_threshold=v_threshold, v0_mode=v0_mode))
            v_init.append(rng.uniform(0.0, v_init_high, size=n) if v_init_high > 0 else np.zeros(n))
        return cls(layer_sizes, recurrent, ff, rec, params, v_init, seed)


def _check_finite(v: np.ndarray, layer: Optional[int] = None, step: Optional[int] = None):
    if not np.all(np.isfinite(v)):
        bad = np.argwhere(~np.isfinite(v))[0]
        neuron = int(bad[-1])
        raise NonFiniteStateError(
            f"non-finite membrane potential at neuron {neuron}"
            + (f" of layer {layer}" if layer is not None else "")
            + (f", step {step}" if step is not None else ""),
            layer=layer,
            neuron=neuron,
            step=step,
        )


def init_state(n_pre: int, n: int, recurrent: bool = False, batch: tuple[int, ...] = (), v_init=None, v_threshold: float = 1.0) -> LayerState:
    """Quiescent traces; an initial membrane above threshold counts as a spike."""
    fan = n_pre + (n if recurrent else 0)
    v = np.zeros(batch + (n,)) if v_init is None else np.broadcast_to(np.asarray(v_init, float), batch + (n,)).copy()
    return LayerState(
        m_trace=np.zeros(batch + (fan,)),
        h_trace=np.zeros(batch + (fan,)),
        r_trace=np.zeros(batch + (n,)),
        v_membrane=v,
        o_output=(v >= v_threshold).astype(float),
    )


def _spike(v_rel: np.ndarray, smooth_slope: Optional[float]) -> np.ndarray:
    if smooth_slope is None:
        return (v_rel >= 0).astype(float)
    return 0.5 * (1.0 + np.tanh(0.5 * smooth_slope * v_rel))


def step_layer(
    state: LayerState,
    input_spikes,
    params: NeuronParams,
    weights: np.ndarray,
    recurrent_weights: Optional[np.ndarray] = None,
    dt: Optional[float] = None,
) -> LayerState:
    """Advance one layer by one step.

    ``input_spikes`` are the counts arriving on the feedforward lines at this
    step.  For a recurrent layer the previous step's own output is appended
    as extra presynaptic lines.  ``dt`` overrides the configured step length,
    which is how irregular sampling enters the recurrences.
    """
    x = np.asarray(input_spikes, dtype=float)
    weights = np.asarray(weights, dtype=float)
    n = weights.shape[0]
    if x.shape[-1] != weights.shape[1]:
        raise SimulationError(f"input has {x.shape[-1]} lines but weights expect fan-in {weights.shape[1]}")
    if recurrent_weights is not None:
        if recurrent_weights.shape != (n, n):
            raise SimulationError("recurrent weights must be square")
        x = np.concatenate([x, state.o_output], axis=-1)
        weights = np.hstack([weights, recurrent_weights])
    if state.m_trace.shape[-1] != x.shape[-1]:
        raise SimulationError(f"state traces have {state.m_trace.shape[-1]} lines, input provides {x.shape[-1]}")
    a, b, g = params.decay_factors(params.dt if dt is None else dt)
    m = a * state.m_trace + x
    h = b * state.h_trace + x
    drive = params.v0 * (m - h) @ weights.T
    r = g * state.r_trace + state.o_output
    v = drive - params.v_threshold * r
    _check_finite(v)
    o = (v >= params.v_threshold).astype(float)
    return LayerState(m, h, r, v, o)


def decay_to(state: LayerState, delta_t: float, params: NeuronParams) -> LayerState:
    """Let the traces relax for ``delta_t`` time units without input.

    The membrane and output are left as they are; only the three
    exponential traces change.
    """
    if delta_t < 0:
        raise SimulationError(f"delta_t must be non-negative, got {delta_t}")
    a, b, g = params.decay_factors(delta_t)
    return LayerState(
        m_trace=state.m_trace * a,
        h_trace=state.h_trace * b,
        r_trace=state.r_trace * g,
        v_membrane=state.v_membrane,
        o_output=state.o_output,
    )


@dataclass
class LayerRecord:
    """Per-step quantities of one layer, batch-major ``(B, T, ...)``.

    ``psp`` holds ``V0 * (M - H)`` per presynaptic line, ``v`` the membrane,
    ``o`` the emitted spikes, and ``o_init`` the output before the first step.
    The decay factor arrays have shape ``(B, T)``.
    """

    psp: np.ndarray
    v: np.ndarray
    o: np.ndarray
    o_init: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray


def simulate(
    x: np.ndarray,
    topology: NetworkTopology,
    dt: Optional[np.ndarray] = None,
    smooth_slope: Optional[float] = None,
    weights: Optional[list[np.ndarray]] = None,
) -> list[LayerRecord]:
    """Run a batch ``x`` of shape ``(B, T, n_in)`` through every layer.

    ``dt`` of shape ``(B, T)`` gives the time elapsed before each step.
    ``smooth_slope`` swaps the Heaviside output for a logistic of that slope,
    producing the differentiable twin used for gradient checks.
    ``weights`` optionally overrides the combined per-layer weight matrices.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 3:
        raise SimulationError(f"input batch must be (B, T, n_in), got shape {x.shape}")
    B, T, n_in = x.shape
    if n_in != topology.layer_sizes[0]:
        raise SimulationError(f"input has {n_in} neurons, first layer expects {topology.layer_sizes[0]}")
    records = []
    layer_in = x
    for l in range(topology.n_layers):
        p = topology.params[l]
        w = topology.combined_weights(l) if weights is None else weights[l]
        n = topology.layer_sizes[l + 1]
        n_pre = topology.layer_sizes[l]
        fan = w.shape[1]
        alpha, beta, gamma = p.decay_factors(np.full((B, T), p.dt) if dt is None else dt)
        v0, th = p.v0, p.v_threshold
        o_init = np.broadcast_to(_spike(topology.v_init[l] - th, smooth_slope), (B, n)).copy()
        psp = np.empty((B, T, fan))
        v = np.empty((B, T, n))
        o = np.empty((B, T, n))
        m = np.zeros((B, fan))
        h = np.zeros((B, fan))
        r = np.zeros((B, n))
        prev = o_init
        rec = topology.recurrent[l]
        xt = np.empty((B, fan))
        for t in range(T):
            xt[:, :n_pre] = layer_in[:, t]
            if rec:
                xt[:, n_pre:] = prev
            a = alpha[:, t, None]
            m *= a
            m += xt
            h *= beta[:, t, None]
            h += xt
            np.subtract(m, h, out=psp[:, t])
            psp[:, t] *= v0
            r *= gamma[:, t, None]
            r += prev
            vt = psp[:, t] @ w.T - th * r
            if not np.all(np.isfinite(vt)):
                _check_finite(vt, layer=l, step=t)
            v[:, t] = vt
            prev = _spike(vt - th, smooth_slope)
            o[:, t] = prev
        records.append(LayerRecord(psp, v, o, o_init, alpha, beta, gamma))
        layer_in = o
    return records


def run_network(
    input: SpikeTensor,
    topology: NetworkTopology,
    params: Optional[NeuronParams] = None,
) -> tuple[SpikeTensor, list[LayerRecord]]:
    """Simulate one spike raster; returns the last layer's raster and traces.

    ``params`` replaces every layer's neuron parameters when given.  With
    timestamps on the input, the gap between observations sets each step's
    decay (the event-driven path).
    """
    if input.neurons != topology.layer_sizes[0]:
        raise SimulationError(
            f"input has {input.neurons} neurons, first layer expects {topology.layer_sizes[0]}"
        )
    if params is not None:
        topology = topology.copy()
        topology.params = [params] * topology.n_layers
    if input.steps == 0:
        return SpikeTensor(np.zeros((0, topology.layer_sizes[-1]))), []
    dt = input.step_sizes()
    records = simulate(input.spikes[None].astype(float), topology, None if dt is None else dt[None])
    out = records[-1].o[0]
    return SpikeTensor(out, input.timestamps), records


@dataclass(frozen=True)
class Theorem1Result:
    order_a_output: tuple[int, int]
    order_b_output: tuple[int, int]
    differ: bool
    potentials_a: tuple[float, float]
    potentials_b: tuple[float, float]


def theorem1_demo(
    l: int = 10,
    mu: float = 1.0,
    sigma: float = 0.05,
    v_th: float = 0.7,
    seed: int = 0,
    mu_prime: float = 1.6,
    seq_a: Optional[Sequence[int]] = None,
    seq_b: Optional[Sequence[int]] = None,
    strict: bool = True,
) -> Theorem1Result:
    """Order dependence of a single neuron under a fire-then-update rule.

    The neuron's potential after a sequence is ``w * mean(s)``, i.e. the PSP
    is normalised so the all-ones sequence drives it to ``w``.  It emits one
    output per sequence.  Whenever it fires, its weight is redrawn from
    ``N(mu_prime, sigma^2)``; otherwise the weight is kept.

    Order A presents ``seq_a`` then ``seq_b``; order B the reverse.  The
    defaults are the all-ones sequence and the half-zeros/half-ones one.
    """
    if l <= 0 or l % 2:
        raise SimulationError(f"sequence length must be a positive even number, got {l}")
    if strict and not (mu / 2 < v_th < mu):
        raise SimulationError(f"need mu/2 < v_th < mu, got mu={mu}, v_th={v_th}")
    s0 = np.ones(l) if seq_a is None else np.asarray(seq_a, float)
    s1 = np.concatenate([np.zeros(l // 2), np.ones(l // 2)]) if seq_b is None else np.asarray(seq_b, float)

    def present(first, second):
        rng = np.random.default_rng(seed)
        w = rng.normal(mu, sigma)
        outs, pots = [], []
        for seq in (first, second):
            v = w * float(np.mean(seq))
            fired = int(v >= v_th)
            outs.append(fired)
            pots.append(v)
            if fired:
                w = rng.normal(mu_prime, sigma)
        return tuple(outs), tuple(pots)

    out_a, pot_a = present(s0, s1)
    out_b, pot_b = present(s1, s0)
    return Theorem1Result(out_a, out_b, out_a != out_b, pot_a, pot_b)
