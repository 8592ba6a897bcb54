import math

import numpy as np
import pytest
from scipy import stats

from fptmc import (
    BridgeSegment,
    JumpTimeline,
    LinearBarrier,
    first_jump_crossing,
    interjump_fpt_density,
    sample_crossing,
    survival_probability,
)
from fptmc.bridge import sample_crossing_array
from helpers import (
    quad_interjump_density,
    ratio_construction_density,
    simulate_bridge_crossing_times,
    simulate_bridge_survival,
)


def seg(x_start=1.0, x_end=1.0, level=0.0, t_start=0.0, t_end=1.0, mu=0.0, sigma=1.0):
    return BridgeSegment(
        x_start=x_start,
        x_end=x_end,
        level=level,
        t_start=t_start,
        t_end=t_end,
        mu=mu,
        sigma=sigma,
    )


def random_segment(rng, level=0.0):
    return seg(
        x_start=level + rng.uniform(0.2, 2.0),
        x_end=level + rng.uniform(-1.0, 2.0),
        level=level,
        t_start=rng.uniform(0.0, 1.0),
        t_end=rng.uniform(1.2, 3.0),
        mu=rng.uniform(-1.0, 1.0),
        sigma=rng.uniform(0.2, 1.5),
    )


class TestSurvivalProbability:
    def test_zero_when_end_at_or_below_level(self):
        assert survival_probability(seg(x_end=0.0)) == 0.0
        assert survival_probability(seg(x_end=-0.3)) == 0.0

    def test_zero_when_start_at_level(self):
        assert survival_probability(seg(x_start=0.0, x_end=1.0, level=0.0)) == 0.0

    def test_symmetric_unit_case(self):
        assert survival_probability(seg()) == pytest.approx(
            1.0 - math.exp(-2.0), rel=1e-12
        )

    def test_brute_force_bridge_minimum(self):
        p = survival_probability(seg())
        est, se = simulate_bridge_survival(
            1.0, 1.0, 0.0, 1.0, 1.0, 100_000, 1000, np.random.default_rng(2024)
        )
        assert abs(est - p) < 3.0 * se

    def test_translation_invariance(self, rng):
        for _ in range(50):
            s = random_segment(rng)
            shift = rng.uniform(-5.0, 5.0)
            shifted = seg(
                s.x_start + shift,
                s.x_end + shift,
                s.level + shift,
                s.t_start,
                s.t_end,
                s.mu,
                s.sigma,
            )
            assert survival_probability(shifted) == pytest.approx(
                survival_probability(s), rel=1e-12, abs=1e-15
            )

    def test_scaling_invariance(self, rng):
        for _ in range(50):
            s = random_segment(rng)
            c = rng.uniform(0.1, 10.0)
            scaled = seg(
                s.level + c * (s.x_start - s.level),
                s.level + c * (s.x_end - s.level),
                s.level,
                s.t_start,
                s.t_end,
                s.mu,
                c * s.sigma,
            )
            assert survival_probability(scaled) == pytest.approx(
                survival_probability(s), rel=1e-12, abs=1e-15
            )

    def test_in_unit_interval(self, rng):
        for _ in range(200):
            p = survival_probability(random_segment(rng))
            assert 0.0 <= p <= 1.0


class TestInterjumpDensity:
    def test_endpoints_raise(self):
        s = seg()
        with pytest.raises(ValueError):
            interjump_fpt_density(s, s.t_start)
        with pytest.raises(ValueError):
            interjump_fpt_density(s, s.t_end)

    def test_certain_crossing_integrates_to_one(self):
        s = seg(x_end=-0.5)
        assert quad_interjump_density(s) == pytest.approx(1.0, abs=1e-3)

    def test_integrates_to_crossing_probability(self):
        s = seg()
        assert quad_interjump_density(s) == pytest.approx(
            1.0 - survival_probability(s), abs=1e-3
        )

    def test_matches_ratio_construction(self, rng):
        for _ in range(100):
            s = random_segment(rng)
            t = rng.uniform(
                s.t_start + 0.05 * s.tau, s.t_start + 0.95 * s.tau
            )
            direct = interjump_fpt_density(s, t)
            via_ratio = ratio_construction_density(
                t, s.x_start, s.x_end, s.level, s.t_start, s.t_end, s.mu, s.sigma
            )
            if via_ratio > 1e-290:
                assert direct == pytest.approx(via_ratio, rel=1e-10)

    def test_crossing_time_histogram(self):
        # fine-grid bridges that do cross, against the conditional density
        # g / (1 - P); the grid is kept fine and the sample modest so the
        # simulation's own detection bias stays below the test's power
        s = seg()
        times = simulate_bridge_crossing_times(
            1.0, 1.0, 0.0, 1.0, 1.0, 15_000, 8000, np.random.default_rng(77)
        )
        edges = np.linspace(0.0, 1.0, 21)
        observed, _ = np.histogram(times, bins=edges)
        from scipy.integrate import quad

        expected = np.array(
            [
                quad(lambda t: interjump_fpt_density(s, t), lo, hi, limit=200)[0]
                for lo, hi in zip(edges[:-1], edges[1:])
            ]
        )
        expected = expected / expected.sum() * observed.sum()
        assert stats.chisquare(observed, expected).pvalue > 0.01


class TestSampleCrossing:
    def test_certain_crossing_always_accepts(self, rng):
        s = seg(x_end=-0.5)  # survival 0
        draws = [sample_crossing(s, rng) for _ in range(5000)]
        assert all(d.crossed for d in draws)
        times = np.array([d.time for d in draws])
        assert np.all((times > s.t_start) & (times <= s.t_end))
        # candidate times are uniform before weighting
        u = (times - s.t_start) / s.tau
        assert stats.kstest(u, "uniform").pvalue > 0.01

    def test_acceptance_rate_matches_crossing_probability(self, rng):
        s = seg()  # survival = 1 - exp(-2)
        n = 100_000
        u = 1.0 - rng.random(n)
        accepted, _, _ = sample_crossing_array(
            s.x_start, s.x_end, s.level, s.t_start, s.t_end, s.mu, s.sigma, u
        )
        p_cross = math.exp(-2.0)
        se = math.sqrt(p_cross * (1 - p_cross) / n)
        assert accepted.mean() == pytest.approx(p_cross, abs=3 * se)

    def test_weighted_draws_reproduce_density_at_midpoint(self, rng):
        # importance identity: E[w * K(s - t)] -> g(t)
        s = seg()
        n = 1_000_000
        u = 1.0 - rng.random(n)
        accepted, times, weights = sample_crossing_array(
            s.x_start, s.x_end, s.level, s.t_start, s.t_end, s.mu, s.sigma, u
        )
        t_mid = 0.5
        width = 0.02
        kernel = np.exp(
            -np.square(times[accepted] - t_mid) / (width * width / 2.0)
        ) / (math.sqrt(math.pi / 2.0) * width)
        estimate = float((weights[accepted] * kernel).sum() / n)
        assert estimate == pytest.approx(interjump_fpt_density(s, t_mid), rel=0.05)

    def test_short_circuit_when_survival_rounds_to_one(self, rng):
        s = seg(x_start=5.0, x_end=5.0, t_end=0.01, sigma=0.1)
        assert survival_probability(s) == 1.0
        for _ in range(100):
            assert not sample_crossing(s, rng).crossed

    def test_draw_fields(self, rng):
        s = seg()
        for _ in range(200):
            d = sample_crossing(s, rng)
            if d.crossed:
                assert s.t_start < d.time <= s.t_end
                assert d.weight > 0.0


class TestFirstJumpCrossing:
    def _timeline(self, instants, pre, post):
        return JumpTimeline(
            instants=np.asarray(instants, dtype=float),
            pre_jump=np.atleast_2d(pre),
            post_jump=np.atleast_2d(post),
        )

    def test_no_jumps(self):
        tl = self._timeline([0.0, 1.0], [[0.5]], np.zeros((1, 0)))
        assert first_jump_crossing(tl, (LinearBarrier(0.0, 0.0),), 0) is None

    def test_direct_breach_at_first_jump(self):
        tl = self._timeline([0.0, 0.4, 1.0], [[1.0, 1.0]], [[-1.0]])
        assert first_jump_crossing(tl, (LinearBarrier(0.0, 0.0),), 0) == 1

    def test_breach_at_second_jump(self):
        tl = self._timeline(
            [0.0, 0.3, 0.6, 1.0], [[1.0, 0.8, 0.5]], [[0.5, -0.1]]
        )
        assert first_jump_crossing(tl, (LinearBarrier(0.0, 0.0),), 0) == 2

    def test_blocked_by_earlier_diffusion_crossing(self):
        # pre-jump value already below the barrier at jump 2: no index exists
        tl = self._timeline(
            [0.0, 0.3, 0.6, 1.0], [[1.0, -0.5, 1.0]], [[0.5, -2.0]]
        )
        assert first_jump_crossing(tl, (LinearBarrier(0.0, 0.0),), 0) is None

    def test_no_breach(self):
        tl = self._timeline([0.0, 0.5, 1.0], [[1.0, 1.2]], [[0.9]])
        assert first_jump_crossing(tl, (LinearBarrier(0.0, 0.0),), 0) is None

    def test_affine_barrier_evaluated_at_jump_instants(self):
        # barrier rises at slope 1: level is 0.5 at the jump time 0.5
        tl = self._timeline([0.0, 0.5, 1.0], [[1.0, 1.0]], [[0.4]])
        assert first_jump_crossing(tl, (LinearBarrier(0.0, 1.0),), 0) == 1
        assert first_jump_crossing(tl, (LinearBarrier(0.0, 0.0),), 0) is None


class TestSegmentValidation:
    def test_bad_interval(self):
        with pytest.raises(ValueError):
            seg(t_start=1.0, t_end=1.0)

    def test_bad_sigma(self):
        with pytest.raises(ValueError):
            seg(sigma=0.0)
