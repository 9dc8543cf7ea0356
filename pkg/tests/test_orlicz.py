"""Orlicz function handles, the norm solver, and Young conjugates."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, optimize

from orlicz_bounds import (
    DomainError,
    Gaussian,
    NonConvexError,
    RangeError,
    SymExponential,
    UnboundedNormError,
    Weights,
    expected_overshoot_function,
    from_callable,
    gaussian_comparison_function,
    linear_function,
    neg_log_survival_function,
    orlicz_norm,
    power_function,
    reciprocal_survival_function,
    scale_function,
    young_conjugate,
)

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


def gaussian_m_by_quadrature(s):
    """Oracle: sqrt(2/pi) * integral_0^s exp(-1/(2 t^2)) dt."""
    if s == 0:
        return 0.0
    val, _ = integrate.quad(
        lambda t: SQRT_2_OVER_PI * math.exp(-1.0 / (2.0 * t * t)), 0.0, s
    )
    return val


class TestMomentFunction:
    def test_zero(self, gaussian, symexp):
        assert expected_overshoot_function(gaussian)(0.0) == 0.0
        assert expected_overshoot_function(symexp)(0.0) == 0.0

    def test_gaussian_matches_quadrature_oracle(self, gaussian):
        m = expected_overshoot_function(gaussian)
        for s in (0.3, 1.0, 2.0, 5.0):
            assert m(s) == pytest.approx(gaussian_m_by_quadrature(s), abs=1e-10)

    def test_gaussian_frozen_value(self, gaussian):
        # quadrature oracle: M(1) = 0.16663094117537258
        m = expected_overshoot_function(gaussian)
        assert m(1.0) == pytest.approx(0.16663094117537258, rel=1e-10)

    def test_gaussian_matches_sampling_oracle(self, gaussian):
        # E(s|xi| - 1)_+ estimated directly
        m = expected_overshoot_function(gaussian)
        draws = np.abs(np.random.default_rng(11).standard_normal(10**6))
        for s in (0.8, 1.5):
            samples = np.maximum(s * draws - 1.0, 0.0)
            se = samples.std(ddof=1) / 1000.0
            assert abs(m(s) - samples.mean()) < 4 * se

    def test_symexp_closed_form(self, symexp):
        # integral_1^inf (u - 1) e^{-u} du = e^{-1} at s = 1; generally s e^{-1/s}
        m = expected_overshoot_function(symexp)
        assert m(1.0) == pytest.approx(math.exp(-1.0), rel=1e-12)
        val, _ = integrate.quad(lambda u: (u - 1) * math.exp(-u), 1.0, np.inf)
        assert m(1.0) == pytest.approx(val, abs=1e-12)
        assert m(2.0) == pytest.approx(2.0 * math.exp(-0.5), rel=1e-12)

    def test_convexity_midpoint(self, gaussian):
        m = expected_overshoot_function(gaussian)
        pts = np.linspace(0.01, 6.0, 40)
        for a in pts[::4]:
            for b in pts[1::5]:
                assert m((a + b) / 2) <= (m(a) + m(b)) / 2 + 1e-9

    def test_handles_are_nondecreasing(self, gaussian):
        grid = np.linspace(0.0, 8.0, 300)
        for fun in (
            expected_overshoot_function(gaussian),
            neg_log_survival_function(gaussian),
            gaussian_comparison_function(),
            reciprocal_survival_function(gaussian, 3),
        ):
            vals = fun.values(grid)
            assert vals[0] == 0.0
            assert np.all(np.diff(vals) >= -1e-15)


class TestNegLogSurvival:
    def test_values(self, gaussian, symexp):
        n = neg_log_survival_function(gaussian)
        assert n(0.0) == 0.0
        assert n(1.0) == pytest.approx(1.147874464449318, rel=1e-12)
        ne = neg_log_survival_function(symexp)
        for t in (0.3, 1.0, 4.0):
            assert ne(t) == pytest.approx(t, rel=1e-14)

    def test_rejects_nonconvex_by_default(self, nonconvex_table_model):
        with pytest.raises(NonConvexError):
            neg_log_survival_function(nonconvex_table_model)
        fun = neg_log_survival_function(nonconvex_table_model, require_convex=False)
        assert not fun.is_orlicz

    def test_scaling_inequality(self, gaussian):
        # s * N(t) <= N(s t) for s >= 1, N convex with N(0) = 0
        n = neg_log_survival_function(gaussian)
        t = np.linspace(0.0, 4.0, 50)
        for s in (1.0, 1.5, 2.0, 4.0):
            assert np.all(s * n.values(t) <= n.values(s * t) + 1e-9)


class TestReciprocalSurvival:
    def test_gaussian_value(self, gaussian):
        fun = reciprocal_survival_function(gaussian, 2)
        assert fun(1.0) == pytest.approx(0.31731050786291415 / 4, rel=1e-12)

    def test_limit_at_zero(self, gaussian):
        fun = reciprocal_survival_function(gaussian, 2)
        assert fun(0.0) == 0.0
        assert fun(1e-9) < 1e-200

    def test_symexp_value(self, symexp):
        fun = reciprocal_survival_function(symexp, 3)
        assert fun(0.5) == pytest.approx(math.exp(-2.0) / 8.0, rel=1e-12)

    def test_k_validation(self, gaussian):
        with pytest.raises(RangeError):
            reciprocal_survival_function(gaussian, 1)

    def test_not_flagged_convex(self, gaussian):
        assert not reciprocal_survival_function(gaussian, 2).is_orlicz

    def test_bounded_function_norm_is_zero(self, gaussian):
        # sup N_{F,k} = 1/(4(k-1)); few entries keep the modular sum below 1
        fun = reciprocal_survival_function(gaussian, 5)
        assert orlicz_norm([1.0, 2.0], fun) == 0.0


class TestComparisonFunction:
    def test_pieces(self):
        h = gaussian_comparison_function()
        assert h(0.5) == 0.5
        assert h(1.0) == 1.0
        assert h(3.0) == 9.0

    def test_gaussian_equivalence_grid(self, gaussian):
        t = np.linspace(0.01, 10.0, 1000)
        h = gaussian_comparison_function().values(t)
        n = gaussian.neg_log_survival(t)
        assert np.all(n >= h / math.sqrt(2 * math.pi * math.e))
        assert np.all(n <= 4.5 * h)


class TestNormSolver:
    def test_l1_recovery(self):
        assert orlicz_norm([1, 2, 3], linear_function()) == pytest.approx(6.0, rel=1e-10)

    def test_l2_recovery(self):
        assert orlicz_norm([3, 4], power_function(2)) == pytest.approx(5.0, rel=1e-10)

    def test_lp_recovery_random(self):
        rng = np.random.default_rng(0)
        lin, sq = linear_function(), power_function(2)
        for _ in range(100):
            x = rng.uniform(0.1, 10.0, rng.integers(1, 12))
            assert orlicz_norm(x, lin) == pytest.approx(np.sum(np.abs(x)), rel=1e-10)
            assert orlicz_norm(x, sq) == pytest.approx(
                math.sqrt(np.sum(x * x)), rel=1e-10
            )

    def test_gaussian_singleton(self, gaussian):
        # rho solves M(1/rho) = 1; oracle: root of the quadrature form of M
        m = expected_overshoot_function(gaussian)
        s_star = optimize.brentq(lambda s: gaussian_m_by_quadrature(s) - 1.0, 0.5, 4.0,
                                 xtol=1e-13)
        assert s_star == pytest.approx(2.2918613785635156, rel=1e-10)
        assert orlicz_norm([1.0], m) == pytest.approx(1.0 / s_star, rel=1e-9)

    def test_residual_at_root(self, gaussian):
        m = expected_overshoot_function(gaussian)
        x = np.array([0.7, 1.3, 2.9, 0.2])
        rho = orlicz_norm(x, m)
        assert abs(np.sum(m.values(x / rho)) - 1.0) <= 1e-9

    def test_zero_vector_rejected(self):
        with pytest.raises(DomainError):
            orlicz_norm([0.0, 0.0], linear_function())

    def test_infinite_entries_unbounded(self):
        with pytest.raises(UnboundedNormError):
            orlicz_norm([1.0, math.inf], linear_function())

    def test_zeros_are_ignored(self):
        assert orlicz_norm([0.0, 5.0, 0.0], linear_function()) == pytest.approx(5.0, rel=1e-10)

    def test_extended_value_domain_bound(self):
        # fun = t/4 on [0, 2], +inf beyond: the domain bound binds before the
        # modular budget does, so ||(v)|| = v/2
        fun = from_callable(lambda t: t / 4.0, label="capped", domain_bound=2.0)
        assert orlicz_norm([4.0], fun) == pytest.approx(2.0, rel=1e-9)

    def test_weights_input(self):
        w = Weights.ascending([1.0, 2.0, 3.0])
        assert orlicz_norm(w, linear_function()) == pytest.approx(6.0, rel=1e-10)


class TestNormProperties:
    @pytest.mark.parametrize("lam", [0.1, 3.0, 100.0])
    def test_homogeneity(self, gaussian, lam):
        m = expected_overshoot_function(gaussian)
        rng = np.random.default_rng(1)
        for _ in range(5):
            x = rng.uniform(0.1, 5.0, 7)
            assert orlicz_norm(lam * x, m) == pytest.approx(
                lam * orlicz_norm(x, m), rel=1e-8
            )

    def test_monotone_in_function(self, gaussian):
        # pointwise smaller function gives smaller norm
        m = expected_overshoot_function(gaussian)
        m2 = m.scaled(2.0)
        t = np.linspace(0.0, 50.0, 301)
        assert np.all(m.values(t) <= m2.values(t))
        rng = np.random.default_rng(2)
        for _ in range(10):
            x = rng.uniform(0.1, 5.0, 6)
            assert orlicz_norm(x, m) <= orlicz_norm(x, m2) + 1e-9

    def test_triangle_inequality(self, gaussian):
        funs = [
            linear_function(),
            power_function(2),
            expected_overshoot_function(gaussian),
            neg_log_survival_function(gaussian),
        ]
        rng = np.random.default_rng(3)
        for fun in funs:
            for _ in range(25):
                n = rng.integers(1, 9)
                a = rng.uniform(0.0, 4.0, n)
                b = rng.uniform(0.0, 4.0, n)
                if not a.any() or not b.any():
                    continue
                assert orlicz_norm(a + b, fun) <= (
                    orlicz_norm(a, fun) + orlicz_norm(b, fun) + 1e-9
                )

    def test_scale_identity(self, gaussian):
        n = neg_log_survival_function(gaussian)
        assert scale_function(n, 1.0) is n
        t = np.linspace(0, 5, 40)
        assert np.allclose(n.scaled(1.0).values(t), n.values(t))

    def test_scaled_norm_comparison(self, gaussian):
        # ||x||_{sM} <= s ||x||_M for s >= 1
        n = neg_log_survival_function(gaussian)
        s = 2 * math.e
        rng = np.random.default_rng(4)
        for _ in range(10):
            x = rng.uniform(0.2, 4.0, 8)
            assert orlicz_norm(x, n.scaled(s)) <= s * orlicz_norm(x, n) * (1 + 1e-9)

    def test_comparison_function_scaled_norm(self):
        # ||(1,1,1,1)||_{H/4}: 4 * (1/4) * H(1/rho) = 1 at rho = 1
        h = gaussian_comparison_function()
        assert orlicz_norm(np.ones(4), h.scaled(0.25)) == pytest.approx(1.0, rel=1e-9)


class TestConjugate:
    def test_trivial_at_mean(self, gaussian):
        m = expected_overshoot_function(gaussian)
        assert young_conjugate(m, SQRT_2_OVER_PI) == pytest.approx(1.0, abs=1e-9)

    def test_matches_survival_at_threshold(self, gaussian):
        m = expected_overshoot_function(gaussian)
        s = gaussian.tail_integral(1.0)
        assert young_conjugate(m, s) == pytest.approx(0.31731050786291415, abs=1e-10)

    def test_infinite_beyond_mean(self, gaussian):
        m = expected_overshoot_function(gaussian)
        assert young_conjugate(m, 0.9) == math.inf
        assert young_conjugate(m, SQRT_2_OVER_PI * (1 + 1e-6)) == math.inf

    def test_search_agrees_with_shortcut(self, gaussian, symexp):
        for model in (gaussian, symexp):
            m = expected_overshoot_function(model)
            for t in (0.25, 1.0, 2.0, 3.5):
                s = model.tail_integral(t)
                a = young_conjugate(m, s, method="tail")
                b = young_conjugate(m, s, method="search")
                assert b == pytest.approx(a, abs=1e-7)

    def test_search_infinite_beyond_mean(self, gaussian):
        m = expected_overshoot_function(gaussian)
        assert young_conjugate(m, SQRT_2_OVER_PI * (1 + 1e-6), method="search") == math.inf

    def test_power_conjugate(self):
        # sup ts - t^2 = s^2 / 4
        sq = power_function(2)
        for s in (0.5, 1.0, 3.0):
            assert young_conjugate(sq, s, method="search") == pytest.approx(
                s * s / 4, rel=1e-8
            )

    def test_linear_conjugate(self):
        lin = linear_function()
        assert young_conjugate(lin, 0.5, method="search") == 0.0
        assert young_conjugate(lin, 1.5, method="search") == math.inf

    def test_zero_argument(self, gaussian):
        m = expected_overshoot_function(gaussian)
        assert young_conjugate(m, 0.0) == 0.0

    def test_duality_identity_grid(self, gaussian):
        m = expected_overshoot_function(gaussian)
        for t in np.arange(0.0, 4.01, 0.25):
            s = gaussian.tail_integral(float(t))
            err = abs(young_conjugate(m, s, method="search") - gaussian.survival(float(t)))
            assert err <= 1e-6

    def test_tail_method_requires_moment_function(self):
        with pytest.raises(DomainError):
            young_conjugate(linear_function(), 0.5, method="tail")


class TestWeights:
    def test_order_violation_names_entry(self):
        with pytest.raises(DomainError, match="entry 3"):
            Weights.ascending([1.0, 2.0, 1.5])
        with pytest.raises(DomainError, match="entry 2"):
            Weights.descending([1.0, 2.0])

    def test_positive_validation(self):
        with pytest.raises(DomainError, match="entry 2"):
            Weights.ascending([1.0, -2.0, 3.0])

    def test_valid(self):
        w = Weights.descending([3.0, 2.0, 1.0])
        assert len(w) == 3


@given(
    st.lists(st.floats(min_value=0.05, max_value=20.0), min_size=1, max_size=10),
    st.sampled_from([0.5, 2.0, 7.0]),
)
def test_homogeneity_property(xs, lam):
    fun = power_function(1.5)
    x = np.array(xs)
    assert orlicz_norm(lam * x, fun) == pytest.approx(lam * orlicz_norm(x, fun), rel=1e-8)


@given(st.floats(min_value=0.0, max_value=8.0), st.floats(min_value=0.0, max_value=8.0))
def test_h_midpoint_convexity(a, b):
    h = gaussian_comparison_function()
    assert h((a + b) / 2) <= (h(a) + h(b)) / 2 + 1e-9
