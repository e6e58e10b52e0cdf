import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import pace_exact, pace_fraction
from spikecl.curriculum import (
    CurriculumMode,
    CurriculumSchedule,
    PacingConfig,
    ScoreVector,
    build_schedule,
    export_schedule,
    pace,
    read_schedule,
    score,
)

finite_losses = st.lists(st.floats(0, 50), min_size=1, max_size=40)


class TestScore:
    def test_uniform(self):
        np.testing.assert_allclose(score([0, 0, 0]).scores, [1 / 3] * 3)

    def test_two_to_one(self):
        np.testing.assert_allclose(score([0.0, math.log(2)]).scores, [2 / 3, 1 / 3], rtol=1e-15)

    @given(finite_losses, st.floats(-20, 20))
    def test_shift_invariant(self, losses, c):
        a = score(losses).scores
        b = score(np.array(losses) + c).scores
        np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-300)

    @given(finite_losses)
    def test_distribution(self, losses):
        p = score(losses).scores
        assert abs(p.sum() - 1.0) <= 1e-12
        assert np.all(p > 0)
        # Lower loss never gets a lower score.
        order = np.argsort(losses, kind="stable")
        assert np.all(np.diff(p[order]) <= 1e-15)

    @pytest.mark.parametrize("bad", [[], [1.0, np.nan], [np.inf]])
    def test_rejects_bad_losses(self, bad):
        with pytest.raises(ValueError):
            score(bad)


class TestPace:
    def test_reference_points(self):
        cfg = PacingConfig(0.05, 50, 1000)
        assert [pace(0, cfg), pace(49, cfg), pace(50, cfg)] == [50, 50, 100]

    def test_full_start(self):
        cfg = PacingConfig(1.0, 50, 37)
        assert {pace(m, cfg) for m in range(500)} == {37}

    def test_saturates(self):
        assert pace(10**9, PacingConfig(0.02, 2500, 100)) == 100

    def test_exhaustive_against_integer_arithmetic(self):
        m = np.arange(0, 10_001)
        for sp_pct in range(2, 21):
            for ss in (50, 100, 350, 1000, 2500):
                for n in (50, 72, 1000):
                    cfg = PacingConfig(sp_pct / 100, ss, n)
                    got = np.array([pace(int(k), cfg) for k in m])
                    assert np.array_equal(got, pace_exact(m, sp_pct, ss, n)), (sp_pct, ss, n)

    @given(st.integers(0, 10_000), st.fractions(Fraction(1, 50), Fraction(1), max_denominator=1000), st.integers(1, 2500), st.integers(1, 5000))
    def test_matches_rationals(self, m, sp, ss, n):
        if sp * n < 1:
            return
        assert pace(m, PacingConfig(float(sp), ss, n)) == pace_fraction(m, sp, ss, n)

    @given(st.integers(0, 10_000), st.integers(0, 10_000), st.floats(0.02, 1.0), st.integers(1, 3000), st.integers(50, 2000))
    def test_monotone(self, m1, m2, sp, ss, n):
        cfg = PacingConfig(sp, ss, n)
        lo, hi = sorted((m1, m2))
        assert 1 <= pace(lo, cfg) <= pace(hi, cfg) <= n

    def test_validation(self):
        with pytest.raises(ValueError):
            PacingConfig(0.01, 50, 50)
        with pytest.raises(ValueError):
            PacingConfig(0.0, 50, 50)
        with pytest.raises(ValueError):
            PacingConfig(0.5, 0, 50)
        with pytest.raises(ValueError):
            pace(-1, PacingConfig())


class TestSchedule:
    scores = ScoreVector(np.array([0.5, 0.3, 0.2]), np.zeros(3))

    def test_a2d_descending(self):
        s = build_schedule(self.scores, "A2D", PacingConfig(1.0, 1, 3))
        np.testing.assert_array_equal(s.order, [0, 1, 2])

    def test_d2a_ascending(self):
        s = build_schedule(self.scores, CurriculumMode.D2A, PacingConfig(1.0, 1, 3))
        np.testing.assert_array_equal(s.order, [2, 1, 0])

    def test_loss_based_aliases(self):
        cfg = PacingConfig(1.0, 1, 3)
        np.testing.assert_array_equal(build_schedule(self.scores, "E2H", cfg).order, build_schedule(self.scores, "A2D", cfg).order)
        np.testing.assert_array_equal(build_schedule(self.scores, "H2E", cfg).order, build_schedule(self.scores, "D2A", cfg).order)

    @pytest.mark.parametrize("mode", ["A2D", "D2A"])
    def test_ties_keep_index_order(self, mode):
        s = build_schedule(score(np.zeros(6)), mode, PacingConfig(1.0, 1, 6))
        np.testing.assert_array_equal(s.order, np.arange(6))

    def test_random_is_seeded(self):
        cfg = PacingConfig(1.0, 1, 20)
        a = build_schedule(None, "Random", cfg, seed=4)
        b = build_schedule(None, "Random", cfg, seed=4)
        c = build_schedule(None, "Random", cfg, seed=5)
        np.testing.assert_array_equal(a.order, b.order)
        assert not np.array_equal(a.order, c.order)

    def test_scored_modes_need_scores(self):
        with pytest.raises(ValueError):
            build_schedule(None, "A2D", PacingConfig(1.0, 1, 3))

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            CurriculumMode.parse("sideways")

    def test_default_length_reaches_full_set(self):
        s = build_schedule(score(np.zeros(40)), "A2D", PacingConfig(0.1, 5, 40))
        assert s.n_steps == 50 and s.sizes[-1] == 40 and s.sizes[0] == 4

    def test_offset_continues_pacing(self):
        cfg = PacingConfig(0.1, 5, 40)
        s = build_schedule(score(np.zeros(40)), "A2D", cfg, start_step=12, n_steps=4)
        np.testing.assert_array_equal(s.sizes, [pace(m, cfg) for m in range(12, 16)])

    @given(st.lists(st.floats(0, 10), min_size=2, max_size=60), st.sampled_from(list(CurriculumMode)), st.integers(1, 8))
    def test_schedule_invariants(self, losses, mode, batch):
        n = len(losses)
        cfg = PacingConfig(max(0.05, 1.0 / n), 3, n)
        s = build_schedule(score(losses), mode, cfg, seed=0, batch_size=batch)
        np.testing.assert_array_equal(np.sort(s.order), np.arange(n))
        assert np.all(np.diff(s.sizes) >= 0) and s.sizes[-1] == n
        for size, b in zip(s.sizes, s.batches()):
            assert len(b) == min(batch, size)
            assert set(b.tolist()) <= set(s.order[:size].tolist())

    def test_batches_cycle_through_pool(self):
        s = CurriculumSchedule(np.array([3, 1, 0, 2]), np.array([4, 4]), CurriculumMode.A2D, batch_size=3)
        batches = list(s.batches())
        np.testing.assert_array_equal(batches[0], [3, 1, 0])
        np.testing.assert_array_equal(batches[1], [2, 3, 1])

    def test_rejects_invalid_schedule(self):
        with pytest.raises(ValueError):
            CurriculumSchedule(np.array([0, 0]), np.array([1]), CurriculumMode.A2D)
        with pytest.raises(ValueError):
            CurriculumSchedule(np.array([0, 1]), np.array([2, 1]), CurriculumMode.A2D)

    def test_export_round_trip(self, tmp_path):
        s = build_schedule(score([0.3, 0.1, 2.0, 0.7]), "A2D", PacingConfig(0.5, 2, 4), start_step=3)
        path = tmp_path / "schedule.tsv"
        export_schedule(s, path)
        back = read_schedule(path)
        np.testing.assert_array_equal(back.order, s.order)
        np.testing.assert_array_equal(back.sizes, s.sizes)
        np.testing.assert_array_equal(back.scores, s.scores)
        assert back.mode is s.mode and back.start_step == 3
