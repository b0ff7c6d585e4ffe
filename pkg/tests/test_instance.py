import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fullbatch_lb.instance import (
    ConstructionParams,
    Variant,
    canonical_params,
    g_subgrad,
    g_value,
    hinge,
    loss_subgrad,
    loss_value,
    nemirovski_subgrad,
    nemirovski_value,
    perturbation_vector,
)
from fullbatch_lb.properties import (
    check_convexity,
    check_hinge_shape,
    check_lipschitz,
    check_subgradient_inequality,
)
from fullbatch_lb.rng import stream


def small_params(variant=Variant.FULL, d=6, n=2, T=4, eps=0.2):
    base = canonical_params(eps, T, d, n)
    return ConstructionParams(
        n=n, d=d, T=T, eps=eps,
        gamma1=base.gamma1, gamma2=base.gamma2, gamma3=base.gamma3,
        variant=variant,
    )


class TestCanonicalParams:
    def test_reference_values(self):
        p = canonical_params(eps=0.16, T=25, d=100, n=4)
        assert p.gamma3 == pytest.approx(0.01, rel=1e-12)
        assert p.gamma2 == pytest.approx(6.4e-4, rel=1e-12)
        assert p.gamma1 == pytest.approx(2.56e-5, rel=1e-12)
        assert p.variant is Variant.FULL

    def test_unit_values(self):
        p = canonical_params(eps=1.0, T=1, d=1, n=1)
        assert p.gamma3 == pytest.approx(1 / 16, rel=1e-12)
        assert p.gamma2 == pytest.approx(1.0, rel=1e-12)
        assert p.gamma1 == pytest.approx(0.25, rel=1e-12)

    def test_schedule_relations(self):
        p = canonical_params(eps=0.3, T=7, d=50, n=3)
        assert p.gamma1 == pytest.approx(p.eps * p.gamma2 / 4, rel=1e-12)
        assert p.gamma2 == pytest.approx(p.eps / (p.T * np.sqrt(p.d)), rel=1e-12)
        assert p.gamma3 == pytest.approx(p.eps / 16, rel=1e-12)

    @pytest.mark.parametrize("kwargs", [
        dict(eps=0.0, T=1, d=1, n=1),
        dict(eps=-0.1, T=1, d=1, n=1),
        dict(eps=0.1, T=0, d=1, n=1),
        dict(eps=0.1, T=1, d=0, n=1),
        dict(eps=0.1, T=1, d=1, n=0),
    ])
    def test_invalid_arguments(self, kwargs):
        with pytest.raises(ValueError):
            canonical_params(**kwargs)

    def test_params_reject_nonpositive_scalars(self):
        with pytest.raises(ValueError):
            ConstructionParams(n=1, d=1, T=1, eps=0.1, gamma1=0.0, gamma2=0.1, gamma3=0.1)

    def test_dict_roundtrip(self):
        p = canonical_params(eps=0.16, T=25, d=100, n=4)
        assert ConstructionParams.from_dict(p.to_dict()) == p


class TestHinge:
    def test_zero_branch(self):
        assert hinge(0.05, 0.1) == 0.0

    def test_boundary_is_inclusive(self):
        assert hinge(-0.1, 0.1) == 0.0

    def test_linear_branch(self):
        assert hinge(-0.25, 0.1) == pytest.approx(-0.15, abs=1e-15)

    @given(
        a=st.floats(-10, 10, allow_nan=False),
        b=st.floats(-10, 10, allow_nan=False),
        gamma2=st.floats(1e-6, 2.0, allow_nan=False),
    )
    @settings(max_examples=300, deadline=None)
    def test_nonpositive_monotone_lipschitz(self, a, b, gamma2):
        ha, hb = hinge(a, gamma2), hinge(b, gamma2)
        assert ha <= 0.0
        if a <= b:
            assert ha <= hb
        assert abs(ha - hb) <= abs(a - b) + 1e-12

    def test_grid_shape_check(self):
        result = check_hinge_shape(gamma2=0.1)
        assert result.violations == 0


class TestGTerm:
    def test_zero_point(self):
        alpha = np.array([1, 0, 1, 1], dtype=np.uint8)
        assert g_value(np.zeros(6), alpha, 0.1) == 0.0

    def test_single_active_coordinate(self):
        # hand evaluation: sqrt(h(-0.2)^2) = 0.1 at gamma2 = 0.1
        w = np.zeros(6)
        w[0] = -0.2
        alpha = np.array([1, 0, 0, 0], dtype=np.uint8)
        assert g_value(w, alpha, 0.1) == pytest.approx(0.1, abs=1e-15)

    def test_all_zero_alpha(self):
        w = -np.ones(6)
        alpha = np.zeros(4, dtype=np.uint8)
        assert g_value(w, alpha, 0.1) == 0.0

    def test_subgrad_zero_point(self):
        alpha = np.array([1, 1, 0, 1], dtype=np.uint8)
        assert np.array_equal(g_subgrad(np.zeros(6), alpha, 0.1), np.zeros(6))

    def test_subgrad_single_coordinate(self):
        w = np.zeros(6)
        w[0] = -0.2
        alpha = np.array([1, 0, 0, 0], dtype=np.uint8)
        expected = np.zeros(6)
        expected[0] = -1.0
        assert np.allclose(g_subgrad(w, alpha, 0.1), expected, atol=1e-15)

    def test_subgrad_kink_returns_zero(self):
        w = np.zeros(6)
        w[0] = -0.1  # exactly -gamma2: h = 0, so g = 0 and the kink rule applies
        alpha = np.array([1, 0, 0, 0], dtype=np.uint8)
        assert np.array_equal(g_subgrad(w, alpha, 0.1), np.zeros(6))

    def test_subgrad_norm_at_most_one(self):
        rng = stream(3, "g-norm")
        for _ in range(200):
            w = rng.uniform(-1, 1, size=8)
            alpha = rng.integers(0, 2, size=6, dtype=np.uint8)
            assert np.linalg.norm(g_subgrad(w, alpha, 0.05)) <= 1.0 + 1e-12


class TestNemirovski:
    def test_origin_full_is_twice_gamma3(self):
        p = small_params()
        assert nemirovski_value(np.zeros(p.dim), p) == 2 * p.gamma3

    def test_origin_simple_is_zero(self):
        p = small_params(variant=Variant.SIMPLE)
        assert nemirovski_value(np.zeros(p.dim), p) == 0.0

    def test_unique_maximizer_with_offset(self):
        p = small_params()
        w = np.zeros(p.dim)
        w[2] = 0.5  # paper coordinate 3
        sigma3 = 3 * p.gamma1 * p.gamma3 / (4 * p.d * p.n)
        assert nemirovski_value(w, p) == pytest.approx(0.5 + sigma3, rel=1e-15)

    def test_subgrad_origin_full(self):
        p = small_params()
        grad = nemirovski_subgrad(np.zeros(p.dim), p)
        expected = np.zeros(p.dim)
        expected[p.d] = 1.0  # sentinel coordinate d+1 (1-based)
        assert np.array_equal(grad, expected)

    def test_subgrad_origin_simple_largest_index_tiebreak(self):
        p = small_params(variant=Variant.SIMPLE)
        grad = nemirovski_subgrad(np.zeros(p.dim), p)
        expected = np.zeros(p.dim)
        expected[p.d] = 1.0
        assert np.array_equal(grad, expected)

    def test_subgrad_negative_max_is_zero(self):
        p = small_params(variant=Variant.SIMPLE)
        w = -0.5 * np.ones(p.dim)
        assert nemirovski_subgrad(w, p) is not None
        assert np.array_equal(nemirovski_subgrad(w, p), np.zeros(p.dim))

    def test_tie_at_zero_picks_coordinate_not_constant(self):
        # max over coordinates equals the constant 0 branch: still returns e_i
        p = small_params(variant=Variant.SIMPLE)
        w = np.zeros(p.dim)
        w[0] = -0.5
        grad = nemirovski_subgrad(w, p)
        expected = np.zeros(p.dim)
        expected[p.d] = 1.0
        assert np.array_equal(grad, expected)

    def test_interior_tie_picks_largest_index(self):
        p = small_params(variant=Variant.SIMPLE)
        w = np.zeros(p.dim)
        w[1] = w[3] = 0.7
        grad = nemirovski_subgrad(w, p)
        expected = np.zeros(p.dim)
        expected[3] = 1.0
        assert np.array_equal(grad, expected)


class TestPerturbationVector:
    def test_mixed_bits(self):
        v = perturbation_vector(np.array([1, 0], dtype=np.uint8), n=2)
        assert np.array_equal(v, np.array([1.0, -0.25, 0.0, 0.0]))

    def test_all_ones(self):
        v = perturbation_vector(np.ones(5, dtype=np.uint8), n=3)
        assert np.array_equal(v[:5], np.ones(5))
        assert np.array_equal(v[5:], np.zeros(2))

    def test_all_zeros_n1(self):
        v = perturbation_vector(np.zeros(4, dtype=np.uint8), n=1)
        assert np.array_equal(v[:4], -0.5 * np.ones(4))

    def test_norm_bound(self):
        rng = stream(5, "valpha")
        for n in (1, 2, 5):
            alpha = rng.integers(0, 2, size=20, dtype=np.uint8)
            assert np.linalg.norm(perturbation_vector(alpha, n)) <= np.sqrt(20)


class TestLoss:
    def test_reference_point_full(self):
        p = small_params()
        w = np.zeros(p.dim)
        w[-1] = -1.0
        alpha = np.array([1, 0, 1, 0, 0, 1], dtype=np.uint8)
        assert loss_value(w, alpha, p) == pytest.approx(-p.eps + 2 * p.gamma3, abs=1e-15)

    def test_origin_full(self):
        p = small_params()
        alpha = np.array([0, 1, 1, 0, 1, 0], dtype=np.uint8)
        assert loss_value(np.zeros(p.dim), alpha, p) == 2 * p.gamma3
        expected = p.gamma1 * perturbation_vector(alpha, p.n)
        expected[-1] += p.eps
        expected[p.d] += 1.0
        assert np.array_equal(loss_subgrad(np.zeros(p.dim), alpha, p), expected)

    def test_origin_simple_is_zero(self):
        p = small_params(variant=Variant.SIMPLE)
        alpha = np.array([1, 1, 0, 0, 1, 0], dtype=np.uint8)
        assert loss_value(np.zeros(p.dim), alpha, p) == 0.0

    def test_dimension_mismatch(self):
        p = small_params()
        alpha = np.zeros(p.d, dtype=np.uint8)
        with pytest.raises(ValueError):
            loss_value(np.zeros(p.dim + 1), alpha, p)
        with pytest.raises(ValueError):
            loss_subgrad(np.zeros(p.dim - 1), alpha, p)
        with pytest.raises(ValueError):
            loss_value(np.zeros(p.dim), np.zeros(p.d + 2, dtype=np.uint8), p)


class TestConvexAnalysisProperties:
    @pytest.mark.parametrize("variant", [Variant.FULL, Variant.SIMPLE])
    def test_convexity(self, variant):
        p = small_params(variant=variant, d=12, T=5)
        result = check_convexity(p, 300, stream(11, "cvx", variant.value))
        assert result.violations == 0, result.detail

    @pytest.mark.parametrize("variant", [Variant.FULL, Variant.SIMPLE])
    def test_subgradient_inequality(self, variant):
        p = small_params(variant=variant, d=12, T=5)
        result = check_subgradient_inequality(p, 300, stream(12, "sub", variant.value))
        assert result.violations == 0

    @pytest.mark.parametrize("variant", [Variant.FULL, Variant.SIMPLE])
    def test_lipschitz(self, variant):
        p = small_params(variant=variant, d=12, T=5)
        result = check_lipschitz(p, 300, stream(13, "lip", variant.value))
        assert result.violations == 0
