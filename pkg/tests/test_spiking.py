import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spikecl.spiking import (
    LayerState,
    NetworkTopology,
    NeuronParams,
    NonFiniteStateError,
    SimulationError,
    SpikeTensor,
    V0Mode,
    decay_to,
    init_state,
    run_network,
    simulate,
    step_layer,
    theorem1_demo,
)


def reference_run(x, w_ff, w_rec, tau_m, tau_s, tau, v_th, v0, v_init=None):
    """Scalar-loop evaluation of the trace recurrences for one layer."""
    T, n_pre = x.shape
    n = w_ff.shape[0]
    lines = n_pre + (n if w_rec is not None else 0)
    a, b, g = math.exp(-1 / tau_m), math.exp(-1 / tau_s), math.exp(-1 / tau)
    M = [0.0] * lines
    H = [0.0] * lines
    R = [0.0] * n
    prev = [1.0 if (v_init is not None and v_init[i] >= v_th) else 0.0 for i in range(n)]
    out = np.zeros((T, n))
    vs = np.zeros((T, n))
    for t in range(T):
        inp = list(x[t]) + (prev if w_rec is not None else [])
        for j in range(lines):
            M[j] = a * M[j] + inp[j]
            H[j] = b * H[j] + inp[j]
        new = []
        for i in range(n):
            drive = 0.0
            for j in range(lines):
                wij = w_ff[i, j] if j < n_pre else w_rec[i, j - n_pre]
                drive += wij * v0 * (M[j] - H[j])
            R[i] = g * R[i] + prev[i]
            v = drive - v_th * R[i]
            vs[t, i] = v
            new.append(1.0 if v >= v_th else 0.0)
        prev = new
        out[t] = new
    return out, vs


class TestNeuronParams:
    def test_decay_factors(self):
        p = NeuronParams(tau_m=20, tau_s=150, tau=20)
        assert p.alpha == pytest.approx(math.exp(-1 / 20), rel=1e-15)
        assert p.beta == pytest.approx(math.exp(-1 / 150), rel=1e-15)
        assert p.gamma == pytest.approx(math.exp(-1 / 20), rel=1e-15)

    def test_paper_normaliser(self):
        p = NeuronParams(tau_m=150, tau_s=20)
        eta = 150 / 20
        assert p.v0 == pytest.approx(eta / (eta - 1))

    def test_exact_peak_normaliser_scales_peak_to_one(self):
        p = NeuronParams(tau_m=150, tau_s=20, v0_mode=V0Mode.EXACT_PEAK)
        t = np.linspace(0, 1000, 200001)
        assert np.max(p.kernel(t)) == pytest.approx(1.0, rel=1e-8)

    def test_exact_peak_with_swapped_constants(self):
        p = NeuronParams(tau_m=20, tau_s=150, v0_mode="exact")
        t = np.linspace(0, 2000, 200001)
        assert np.max(np.abs(p.kernel(t))) == pytest.approx(1.0, rel=1e-8)

    @pytest.mark.parametrize("field", ["tau_m", "tau_s", "tau", "v_threshold", "dt"])
    def test_rejects_non_positive(self, field):
        with pytest.raises(SimulationError):
            NeuronParams(**{field: 0.0})

    def test_rejects_degenerate_kernel(self):
        with pytest.raises(SimulationError):
            NeuronParams(tau_m=20, tau_s=20)


class TestSpikeTensor:
    def test_rejects_non_binary(self):
        with pytest.raises(SimulationError):
            SpikeTensor(np.array([[0, 2]]))

    def test_rejects_non_increasing_timestamps(self):
        with pytest.raises(SimulationError):
            SpikeTensor(np.zeros((3, 1)), timestamps=np.array([0.0, 1.0, 1.0]))

    def test_step_sizes(self):
        s = SpikeTensor(np.zeros((3, 1)), timestamps=np.array([0.0, 2.5, 3.0]))
        np.testing.assert_array_equal(s.step_sizes(), [1.0, 2.5, 0.5])


class TestStepLayer:
    def test_zero_fixed_point(self):
        p = NeuronParams()
        s = init_state(3, 2)
        out = step_layer(s, np.zeros(3), p, np.ones((2, 3)))
        assert out == init_state(3, 2)

    def test_single_input_spike_hand_values(self):
        # One spike at t=0 through w=1; a huge threshold keeps the neuron quiet.
        p = NeuronParams(tau_m=150, tau_s=20, v_threshold=1e9)
        s = step_layer(init_state(1, 1), np.array([1.0]), p, np.array([[1.0]]))
        s = step_layer(s, np.array([0.0]), p, np.array([[1.0]]))
        assert s.m_trace[0] == pytest.approx(math.exp(-1 / 150), rel=1e-15)
        assert s.h_trace[0] == pytest.approx(math.exp(-1 / 20), rel=1e-15)
        assert s.o_output[0] == 0.0

    def test_reset_branch(self):
        p = NeuronParams(tau_m=150, tau_s=20, tau=20, v_threshold=0.5)
        w = np.array([[100.0]])
        s = step_layer(init_state(1, 1), np.array([1.0]), p, w)
        s = step_layer(s, np.array([1.0]), p, w)
        assert s.o_output[0] == 1.0
        s2 = step_layer(s, np.array([0.0]), p, w)
        assert s2.r_trace[0] == pytest.approx(p.gamma * s.r_trace[0] + 1.0)
        drive = p.v0 * (s2.m_trace - s2.h_trace) @ w.T
        assert s2.v_membrane[0] == pytest.approx(drive[0] - p.v_threshold * s2.r_trace[0])

    def test_dimension_mismatch(self):
        with pytest.raises(SimulationError):
            step_layer(init_state(3, 2), np.zeros(4), NeuronParams(), np.ones((2, 3)))

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_non_finite_names_neuron(self):
        w = np.array([[1.0], [np.inf]])
        with pytest.raises(NonFiniteStateError) as err:
            step_layer(init_state(1, 2), np.array([1.0]), NeuronParams(), w)
        assert err.value.neuron == 1

    def test_recurrent_appends_own_output(self):
        p = NeuronParams(tau_m=150, tau_s=20, v_threshold=0.1)
        w_ff = np.array([[0.0], [0.0]])
        w_rec = np.array([[0.0, 5.0], [0.0, 0.0]])
        s = init_state(1, 2, recurrent=True, v_init=np.array([0.0, 1.0]), v_threshold=0.1)
        assert s.o_output.tolist() == [0.0, 1.0]
        s = step_layer(s, np.array([0.0]), p, w_ff, w_rec)
        np.testing.assert_array_equal(s.m_trace, [0.0, 0.0, 1.0])


class TestDecay:
    def test_analytic_value(self):
        s = LayerState(np.ones(1), np.ones(1), np.ones(1), np.zeros(1), np.zeros(1))
        out = decay_to(s, 20.0, NeuronParams(tau_m=20, tau_s=150, tau=20))
        assert out.m_trace[0] == pytest.approx(math.exp(-1), rel=1e-15)

    def test_zero_gap_is_identity(self):
        s = LayerState(np.full(2, 0.3), np.full(2, 0.7), np.ones(2), np.ones(2), np.zeros(2))
        assert decay_to(s, 0.0, NeuronParams()) == s

    def test_negative_gap(self):
        s = init_state(1, 1)
        with pytest.raises(SimulationError):
            decay_to(s, -1.0, NeuronParams())

    @given(st.floats(0, 500), st.floats(0, 500))
    def test_chained_gaps_add(self, d1, d2):
        p = NeuronParams(tau_m=150, tau_s=20, tau=20)
        s = LayerState(np.array([2.0]), np.array([1.5]), np.array([0.5]), np.zeros(1), np.zeros(1))
        a = decay_to(decay_to(s, d1, p), d2, p)
        b = decay_to(s, d1 + d2, p)
        for f in ("m_trace", "h_trace", "r_trace"):
            np.testing.assert_allclose(getattr(a, f), getattr(b, f), rtol=1e-12, atol=1e-300)

    @pytest.mark.parametrize("k", [1, 7, 100, 10_000])
    def test_matches_zero_input_steps(self, k):
        p = NeuronParams(tau_m=150, tau_s=20, tau=20, v_threshold=1e9)
        w = np.array([[0.5, -0.2]])
        s = step_layer(init_state(2, 1), np.array([1.0, 1.0]), p, w)
        stepped = s
        for _ in range(k):
            stepped = step_layer(stepped, np.zeros(2), p, w)
        jumped = decay_to(s, float(k), p)
        for f in ("m_trace", "h_trace", "r_trace"):
            np.testing.assert_allclose(getattr(jumped, f), getattr(stepped, f), rtol=1e-12, atol=0)


def _topology(seed, recurrent=True, sizes=(4, 5, 3)):
    return NetworkTopology.random(list(sizes), recurrent, mu_w=0.5, sigma_w=4.0, seed=seed, v_init_high=2.0)


class TestSimulate:
    @pytest.mark.parametrize("recurrent", [True, False])
    def test_matches_scalar_reference(self, recurrent):
        rng = np.random.default_rng(3)
        topo = _topology(1, recurrent)
        x = (rng.random((30, 4)) < 0.4).astype(float)
        records = simulate(x[None], topo)
        layer_in = x
        for l, rec in enumerate(records):
            p = topo.params[l]
            ref_o, ref_v = reference_run(
                layer_in, topo.ff_weights[l], topo.rec_weights[l], p.tau_m, p.tau_s, p.tau, p.v_threshold, p.v0, topo.v_init[l]
            )
            np.testing.assert_allclose(rec.v[0], ref_v, rtol=1e-10, atol=1e-10)
            np.testing.assert_array_equal(rec.o[0], ref_o)
            layer_in = ref_o

    def test_matches_step_layer(self):
        rng = np.random.default_rng(0)
        topo = _topology(2, sizes=(4, 3))
        x = (rng.random((20, 4)) < 0.5).astype(float)
        rec = simulate(x[None], topo)[0]
        p = topo.params[0]
        s = init_state(4, 3, recurrent=True, v_init=topo.v_init[0], v_threshold=p.v_threshold)
        for t in range(20):
            s = step_layer(s, x[t], p, topo.ff_weights[0], topo.rec_weights[0])
            np.testing.assert_allclose(s.v_membrane, rec.v[0, t], rtol=1e-12, atol=1e-12)
            np.testing.assert_array_equal(s.o_output, rec.o[0, t])

    def test_rejects_wrong_input_width(self):
        with pytest.raises(SimulationError):
            simulate(np.zeros((1, 5, 3)), _topology(0))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.integers(1, 40))
    def test_deterministic_and_binary(self, seed, steps):
        rng = np.random.default_rng(seed)
        topo = _topology(seed % 1000)
        x = (rng.random((2, steps, 4)) < 0.3).astype(float)
        a = simulate(x, topo)
        b = simulate(x, topo)
        for ra, rb in zip(a, b):
            assert np.array_equal(ra.v, rb.v)
            assert set(np.unique(ra.o)) <= {0.0, 1.0}

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_traces_non_negative_for_spike_input(self, seed):
        rng = np.random.default_rng(seed)
        p = NeuronParams(tau_m=150, tau_s=20)
        w = rng.normal(size=(2, 3))
        s = init_state(3, 2)
        for _ in range(30):
            s = step_layer(s, (rng.random(3) < 0.5).astype(float), p, w)
            assert np.all(s.m_trace >= 0) and np.all(s.h_trace >= 0) and np.all(s.r_trace >= 0)
            # o = 1 exactly when the membrane reached threshold.
            np.testing.assert_array_equal(s.o_output, (s.v_membrane >= p.v_threshold).astype(float))

    def test_slow_trace_dominates_with_tau_m_above_tau_s(self):
        p = NeuronParams(tau_m=150, tau_s=20, v_threshold=1e9)
        s = init_state(1, 1)
        for t in range(200):
            s = step_layer(s, np.array([float(t % 3 == 0)]), p, np.array([[1.0]]))
            if t >= 1:
                assert s.m_trace[0] >= s.h_trace[0]


class TestRunNetwork:
    def test_empty_input(self):
        out, records = run_network(SpikeTensor(np.zeros((0, 4))), _topology(0))
        assert out.steps == 0 and out.neurons == 3 and records == []

    def test_zero_input_zero_init_is_silent(self):
        topo = NetworkTopology.random([4, 5, 3], True, mu_w=0.5, sigma_w=4.0, seed=0)
        out, _ = run_network(SpikeTensor(np.zeros((50, 4))), topo)
        assert out.spikes.sum() == 0

    def test_timestamps_drive_decay(self):
        topo = _topology(0)
        spikes = (np.random.default_rng(0).random((10, 4)) < 0.5).astype(np.uint8)
        regular, rec_a = run_network(SpikeTensor(spikes), topo)
        unit, rec_b = run_network(SpikeTensor(spikes, np.arange(10.0)), topo)
        assert regular == SpikeTensor(unit.spikes)
        np.testing.assert_array_equal(rec_a[0].v, rec_b[0].v)
        _, rec_c = run_network(SpikeTensor(spikes, np.arange(10.0) * 3), topo)
        assert not np.array_equal(rec_a[0].v, rec_c[0].v)

    def test_params_override(self):
        topo = _topology(0)
        p = NeuronParams(tau_m=40, tau_s=5)
        spikes = (np.random.default_rng(0).random((10, 4)) < 0.5).astype(np.uint8)
        _, records = run_network(SpikeTensor(spikes), topo, p)
        assert len(records) == 2
        assert topo.params[0] != p


class TestTopology:
    def test_shapes(self):
        topo = NetworkTopology.random([6, 4, 2], [True, False], seed=0)
        assert topo.ff_weights[0].shape == (4, 6)
        assert topo.rec_weights[0].shape == (4, 4)
        assert topo.rec_weights[1] is None
        assert topo.combined_weights(0).shape == (4, 10)

    def test_rejects_non_square_recurrent(self):
        topo = NetworkTopology.random([3, 2], True, seed=0)
        with pytest.raises(SimulationError):
            NetworkTopology([3, 2], [True], topo.ff_weights, [np.ones((2, 3))], topo.params)

    def test_time_constants_clamped(self):
        topo = NetworkTopology.random([3, 2], True, tau_m=(0.1, 0.0), tau_s=(5.0, 0.0), tau=(-3.0, 0.0), seed=0)
        p = topo.params[0]
        assert p.tau_m == 1.0 and p.tau == 1.0

    def test_initial_membrane_range(self):
        topo = NetworkTopology.random([3, 500], False, v_init_high=20.018, seed=0)
        v = topo.v_init[0]
        assert v.min() >= 0 and v.max() <= 20.018


class TestOrderDependence:
    def test_reference_fixture(self):
        res = theorem1_demo()
        assert res.order_a_output == (1, 1)
        assert res.order_b_output == (0, 1)
        assert res.differ

    def test_identical_sequences_do_not_differ(self):
        ones = np.ones(10)
        assert not theorem1_demo(seq_a=ones, seq_b=ones).differ

    def test_threshold_above_mean_is_silent(self):
        res = theorem1_demo(v_th=1.5, strict=False)
        assert res.order_a_output == (0, 0) and res.order_b_output == (0, 0)
        assert not res.differ

    @pytest.mark.parametrize("kwargs", [{"v_th": 0.4}, {"v_th": 1.2}, {"l": 7}])
    def test_preconditions(self, kwargs):
        with pytest.raises(SimulationError):
            theorem1_demo(**kwargs)
