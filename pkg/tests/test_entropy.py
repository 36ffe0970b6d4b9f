import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minent.entropy import (
    Distribution,
    estimation_gap,
    inverted_near_uniform,
    min_entropy,
    near_uniform,
    power_sum,
    renyi_entropy,
    shannon_entropy,
    solve_theta_from_power_sum,
    theta_lower_bound,
    theta_upper_bound,
    v_bar_prediction,
    variance_ratio_prediction,
)


def forward_bound(theta, alpha, k):
    return theta**alpha + (1 - theta) ** alpha / (k - 1) ** (alpha - 1)


distributions = st.lists(
    st.floats(min_value=1e-6, max_value=1.0), min_size=1, max_size=12
).map(Distribution.normalized)


class TestDistribution:
    def test_rejects_bad_sum(self):
        with pytest.raises(ValueError, match="sum"):
            Distribution([0.5, 0.4])

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            Distribution([1.5, -0.5])

    def test_normalized_classmethod(self):
        d = Distribution.normalized([2.0, 1.0, 1.0])
        assert np.allclose(d.probs, [0.5, 0.25, 0.25])

    def test_deterministic_allowed(self):
        assert Distribution([1.0, 0.0]).max_prob == 1.0


class TestEntropies:
    def test_shannon_uniform_binary(self):
        assert shannon_entropy([0.5, 0.5]) == 1.0

    def test_shannon_deterministic(self):
        assert shannon_entropy([1.0, 0.0]) == 0.0

    def test_shannon_skewed(self):
        assert shannon_entropy([0.3, 0.7]) == pytest.approx(0.881291, abs=1e-6)

    def test_renyi_collision(self):
        assert renyi_entropy([0.3, 0.7], 2) == pytest.approx(-math.log2(0.58))
        assert renyi_entropy([0.3, 0.7], 2) == pytest.approx(0.785875, abs=1e-6)

    def test_renyi_uniform_any_order(self):
        for alpha in (0.5, 2, 3, 17):
            assert renyi_entropy([0.25] * 4, alpha) == pytest.approx(2.0)

    def test_renyi_large_alpha_approaches_min_entropy(self):
        assert renyi_entropy([0.3, 0.7], 100) == pytest.approx(0.514573, abs=0.01)

    def test_renyi_huge_alpha_no_underflow(self):
        d = Distribution.normalized([1.0] * 9 + [2.0])
        assert renyi_entropy(d, 1000) == pytest.approx(min_entropy(d), abs=1e-2)

    def test_renyi_rejects_alpha_one(self):
        with pytest.raises(ValueError):
            renyi_entropy([0.5, 0.5], 1.0)

    def test_min_entropy_values(self):
        assert min_entropy([0.5, 0.5]) == 1.0
        assert min_entropy([0.3, 0.7]) == pytest.approx(0.514573, abs=1e-6)
        assert min_entropy(near_uniform(0.5, 64)) == 1.0
        assert min_entropy([1.0, 0.0]) == 0.0

    def test_power_sum_values(self):
        assert power_sum([0.5, 0.5], 3) == 0.25
        assert power_sum([0.3, 0.7], 2) == pytest.approx(0.58)
        for alpha in (2, 5, 9):
            assert power_sum([0.5, 0.5], alpha) == pytest.approx(2.0 ** (1 - alpha))

    @given(distributions, st.integers(min_value=2, max_value=9))
    def test_power_sum_matches_renyi(self, d, alpha):
        assert power_sum(d, alpha) == pytest.approx(
            2.0 ** ((1 - alpha) * renyi_entropy(d, alpha))
        )

    @given(distributions, st.integers(min_value=2, max_value=9))
    def test_power_sum_range(self, d, alpha):
        m = power_sum(d, alpha)
        assert 1.0 / d.k ** (alpha - 1) - 1e-12 <= m <= 1.0 + 1e-12

    @given(
        distributions,
        st.floats(min_value=1.01, max_value=40.0),
        st.floats(min_value=1.01, max_value=40.0),
    )
    def test_renyi_non_increasing_in_alpha(self, d, a1, a2):
        lo, hi = sorted((a1, a2))
        assert renyi_entropy(d, lo) >= renyi_entropy(d, hi) - 1e-9

    @given(distributions, st.floats(min_value=0.2, max_value=50.0))
    def test_min_entropy_is_lower_bound(self, d, alpha):
        if abs(alpha - 1.0) < 1e-3:
            alpha += 0.01
        assert min_entropy(d) <= renyi_entropy(d, alpha) + 1e-9


class TestConstructions:
    def test_near_uniform_binary(self):
        assert np.allclose(near_uniform(0.5, 2).probs, [0.5, 0.5])

    def test_near_uniform_k64(self):
        d = near_uniform(0.5, 64)
        assert d.probs[0] == 0.5
        assert np.allclose(d.probs[1:], 0.5 / 63)
        assert d.k == 64

    def test_near_uniform_deterministic_limit(self):
        assert np.allclose(near_uniform(1.0, 3).probs, [1.0, 0.0, 0.0])

    def test_near_uniform_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            near_uniform(0.1, 4)

    def test_inverted_near_uniform_no_residual(self):
        assert np.allclose(inverted_near_uniform(0.5, 4).probs, [0.5, 0.5, 0, 0])

    def test_inverted_near_uniform_residual(self):
        d = inverted_near_uniform(0.4, 4)
        assert np.allclose(d.probs, [0.4, 0.4, 0.2, 0.0])
        assert d.max_prob == 0.4

    def test_inverted_near_uniform_deterministic(self):
        assert np.allclose(inverted_near_uniform(1.0, 2).probs, [1.0, 0.0])

    def test_inverted_near_uniform_rejects_out_of_range(self):
        # 0.3 < 1/3, so no 3-symbol distribution has maximum 0.3
        with pytest.raises(ValueError):
            inverted_near_uniform(0.3, 3)


class TestBounds:
    def test_upper_bound_binary_closed_form(self):
        assert theta_upper_bound(0.58, 2) == pytest.approx(0.7)

    def test_upper_bound_uniform_case(self):
        for k in (2, 5, 64):
            assert theta_upper_bound(1.0 / k, k) == pytest.approx(1.0 / k)

    def test_upper_bound_near_uniform_witness(self):
        pc = power_sum(near_uniform(0.5, 64), 2)
        assert pc == pytest.approx(0.2539683, abs=1e-7)
        assert theta_upper_bound(pc, 64) == pytest.approx(0.5, abs=1e-12)

    def test_lower_bound_values(self):
        assert theta_lower_bound(0.5) == pytest.approx(0.5)
        assert theta_lower_bound(0.4) == pytest.approx(0.438743, abs=1e-6)
        assert theta_lower_bound(1.0) == 1.0

    @given(st.floats(min_value=0.02, max_value=0.999))
    def test_sharpness_witnesses(self, pc):
        # near-uniform witness at k = 64
        k = 64
        pc_hi = max(pc, 1.0 / k + 1e-9)
        theta = theta_upper_bound(pc_hi, k)
        assert power_sum(near_uniform(theta, k), 2) == pytest.approx(pc_hi, abs=1e-10)
        # inverted near-uniform witness, alphabet big enough for the residual
        psi = theta_lower_bound(pc)
        n = math.floor(1.0 / psi)
        assert power_sum(inverted_near_uniform(psi, n + 1), 2) == pytest.approx(
            pc, abs=1e-10
        )

    @given(st.floats(min_value=0.011, max_value=1.0))
    def test_floor_of_reciprocal_preserved(self, psi):
        n = math.floor(1.0 / psi)
        m2 = power_sum(inverted_near_uniform(psi, n + 1), 2)
        assert math.floor(1.0 / m2) == n

    @given(st.floats(min_value=0.51, max_value=1.0))
    def test_binary_bounds_coincide(self, pc):
        assert theta_lower_bound(pc) == pytest.approx(
            theta_upper_bound(pc, 2), abs=1e-12
        )

    @given(st.integers(min_value=2, max_value=128), st.floats(min_value=0.0, max_value=1.0))
    def test_ordering_and_gap(self, k, frac):
        pc = 1.0 / k + frac * (1.0 - 1.0 / k)
        psi = theta_lower_bound(pc)
        theta = theta_upper_bound(pc, k)
        assert psi <= theta + 1e-12
        assert estimation_gap(pc, k) >= -1e-12

    def test_gap_zero_for_binary(self):
        # binary collision probabilities live in [1/2, 1]
        for pc in (0.5, 0.58, 0.75, 0.9, 0.999):
            assert estimation_gap(pc, 2) == pytest.approx(0.0, abs=1e-12)

    def test_gap_rejects_infeasible_pc(self):
        with pytest.raises(ValueError):
            estimation_gap(0.4, 2)

    def test_gap_grows_with_k(self):
        g8 = estimation_gap(0.4, 8)
        g64 = estimation_gap(0.4, 64)
        assert 0.0 < g8 < g64


class TestBisection:
    def test_matches_closed_form_at_alpha_two(self):
        for k in (2, 4, 64):
            for pc in (1.0 / k + 0.01, 0.4, 0.58, 0.9, 0.999):
                if pc <= 1.0 / k:
                    continue
                got = solve_theta_from_power_sum(pc, 2, k, 1e-12)
                assert got == pytest.approx(theta_upper_bound(pc, k), abs=1e-10)

    def test_binary_cubic_example(self):
        assert solve_theta_from_power_sum(0.37, 3, 2) == pytest.approx(0.7, abs=1e-10)

    def test_near_uniform_floor_limit(self):
        for alpha in (2, 3, 5):
            k = 4
            floor = 1.0 / k ** (alpha - 1)
            got = solve_theta_from_power_sum(floor * (1 + 1e-9), alpha, k, 1e-12)
            assert got == pytest.approx(1.0 / k, abs=1e-4)

    @given(
        st.integers(min_value=2, max_value=8),
        st.sampled_from([2, 4, 64]),
        st.floats(min_value=1e-6, max_value=1.0),
    )
    @settings(max_examples=200)
    def test_round_trip(self, alpha, k, frac):
        theta = 1.0 / k + frac * (1.0 - 1.0 / k)
        m = forward_bound(theta, alpha, k)
        got = solve_theta_from_power_sum(m, alpha, k, 1e-12)
        assert got == pytest.approx(theta, abs=1e-10)

    def test_rejects_impossible_power_sum(self):
        with pytest.raises(ValueError, match="exceeds 1"):
            solve_theta_from_power_sum(1.5, 2, 2)

    def test_rejects_uniform_floor(self):
        with pytest.raises(ValueError, match="floor"):
            solve_theta_from_power_sum(0.25, 3, 2)

    def test_non_finite_input_flagged(self):
        with pytest.raises(ValueError, match="finite"):
            solve_theta_from_power_sum(math.nan, 2, 2)


class TestPredictions:
    def test_variance_ratio_values(self):
        assert variance_ratio_prediction(2) == pytest.approx(16.0 / 81.0)
        assert variance_ratio_prediction(3) == pytest.approx(0.316406, abs=1e-6)

    def test_variance_ratio_approaches_one(self):
        assert variance_ratio_prediction(400) == pytest.approx(1.0, abs=0.01)
        assert variance_ratio_prediction(400) < 1.0

    def test_v_bar_values(self):
        # log2 C(1024, 2) and log4 C(1024, 3), evaluated independently
        assert v_bar_prediction(0.5, 1024, 2) == pytest.approx(
            math.log2(1024 * 1023 / 2), abs=1e-9
        )
        assert v_bar_prediction(0.25, 1024, 3) == pytest.approx(13.7054, abs=1e-3)

    def test_v_bar_ratio_matches_prediction(self):
        # for uniform binary and large l the ratio tends to (a^2-1)/a^2
        l = 10**6
        for alpha in (2, 3, 4):
            v_a = v_bar_prediction(2.0 ** (1 - alpha), l, alpha)
            v_b = v_bar_prediction(2.0 ** (-alpha), l, alpha + 1)
            assert v_b / v_a == pytest.approx(
                (alpha**2 - 1) / alpha**2, rel=0.02
            )

    def test_v_bar_rejects_degenerate(self):
        with pytest.raises(ValueError):
            v_bar_prediction(1.0, 100, 2)
        with pytest.raises(ValueError):
            v_bar_prediction(0.0, 100, 2)
