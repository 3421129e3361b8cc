import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bandlim.grid import (
    MAX_BESSEL_EPSILON,
    CallableGeneratingFunction,
    GridError,
    SamplingGrid,
    bessel_grid,
    explicit_grid,
    generating_function,
    lower_uniform_density,
    product_generating_function,
    uniform_grid,
    union_grid,
    verify_sine_type,
)
from bandlim.specfun import bessel_j0


class TestUniform:
    def test_small_window(self):
        g = uniform_grid(1.0, 2)
        assert np.array_equal(g.nodes, [-2, -1, 0, 1, 2])
        S = generating_function(g)
        z = np.linspace(-3, 3, 13)
        assert np.allclose(S(z), np.sin(np.pi * z) / np.pi, atol=1e-15)

    def test_single_node(self):
        g = uniform_grid(1.0, 0)
        S = generating_function(g)
        assert S(0.0) == 0.0
        assert S.deriv_at_node(0) == 1.0

    def test_density_two(self):
        S = generating_function(uniform_grid(2.0, 1))
        assert abs(S(0.25) - 1 / (2 * math.pi)) < 1e-16

    def test_node_derivatives_alternate(self):
        g = uniform_grid(1.0, 50)
        S = generating_function(g)
        assert np.array_equal(S.node_derivatives, (-1.0) ** g.labels)

    def test_extra_on_node_rejected_with_index(self):
        with pytest.raises(GridError, match="node index 3"):
            uniform_grid(1.0, 5, extra=3.0)

    def test_extra_floor(self):
        with pytest.raises(GridError, match="floor"):
            uniform_grid(1.0, 5, extra=0.05)
        g = SamplingGrid(np.arange(-5.0, 6.0), 0.05, -5, extra_floor=0.01)
        assert g.extra_node == 0.05

    def test_invalid_density(self):
        with pytest.raises(GridError):
            uniform_grid(0.0, 3)

    def test_nonincreasing_rejected(self):
        with pytest.raises(GridError, match="strictly increasing"):
            SamplingGrid(np.array([0.0, 1.0, 1.0]))

    def test_immutable(self):
        g = uniform_grid(1.0, 3)
        with pytest.raises(ValueError):
            g.nodes[0] = 5.0


class TestBessel:
    def test_first_zero_node(self):
        g = bessel_grid(0.1, 5)
        j1 = 2.40482555769577
        assert np.min(np.abs(g.nodes - 2 * j1 / np.pi)) < 1e-12

    def test_zero_is_node_and_minus_eps_is_not(self):
        # -eps is not a zero of z J0(pi z/2) J0(pi (z + eps)/2)
        for eps in (0.05, 0.1, 0.5):
            g = bessel_grid(eps, 4)
            S = generating_function(g)
            assert 0.0 in g.nodes
            assert abs(S(-eps)) > 1e-3
            assert np.min(np.abs(g.nodes + eps)) == pytest.approx(eps)

    def test_values_at_one(self):
        S = generating_function(bessel_grid(0.1, 5))
        ref = 1.0 * bessel_j0(np.pi / 2) * bessel_j0(np.pi * 1.1 / 2)
        assert abs(S(1.0) - ref) < 1e-15

    def test_vanishes_at_nodes(self):
        g = bessel_grid(0.1, 40)
        S = generating_function(g)
        assert np.max(np.abs(S(g.nodes))) < 1e-11

    def test_node_derivatives_match_difference_quotient(self):
        g = bessel_grid(0.2, 10)
        S = generating_function(g)
        h = 1e-6
        fd = (S(g.nodes + h) - S(g.nodes - h)) / (2 * h)
        assert np.allclose(fd, S.node_derivatives, atol=1e-8)

    def test_derivatives_bounded_above_and_below(self):
        g = bessel_grid(0.1, 200)
        d = np.abs(generating_function(g).node_derivatives)
        assert d.min() > 0.01 and d.max() < 10

    def test_epsilon_too_large_reports_gap(self):
        with pytest.raises(GridError, match="gap"):
            bessel_grid(0.9, 5)
        with pytest.raises(GridError):
            bessel_grid(0.0, 5)
        bessel_grid(MAX_BESSEL_EPSILON * 0.999, 5)

    def test_asymptotic_spacing(self):
        g = bessel_grid(0.1, 400)
        fam = g.params["family"]
        pos = g.nodes[(fam == 1) & (g.nodes > 0)]
        gaps = np.diff(pos)
        assert abs(gaps[-1] - 2.0) < 1e-6
        assert np.all(np.abs(np.diff(np.abs(gaps[5:] - 2))) >= 0) and abs(gaps[-1] - 2) < abs(gaps[0] - 2)

    def test_separation_is_epsilon(self):
        g = bessel_grid(0.3, 20)
        assert abs(g.separation - 0.3) < 1e-12


class TestUnion:
    def test_zeros_and_derivatives(self):
        g = union_grid(1.0, 0.3, 20)
        S = generating_function(g)
        assert np.max(np.abs(S(g.nodes))) < 1e-12
        h = 1e-6
        fd = (S(g.nodes + h) - S(g.nodes - h)) / (2 * h)
        assert np.allclose(fd, S.node_derivatives, atol=1e-7)

    def test_theta_range(self):
        with pytest.raises(GridError):
            union_grid(1.0, 1.0, 3)


class TestProduct:
    def test_vanishes_at_nodes_exactly(self):
        g = uniform_grid(1.0, 300)
        P = product_generating_function(g, 200)
        inner = g.nodes[np.abs(g.nodes) < 200]
        assert np.all(P(inner) == 0)
        assert P(0.0) == 0

    def test_half_point(self):
        P = product_generating_function(uniform_grid(1.0, 300), 200)
        assert abs(P(0.5) - 1 / np.pi) < 1e-2

    def test_converges_under_radius_doubling(self):
        g = uniform_grid(1.0, 3300)
        z = np.random.default_rng(3).uniform(-5, 5, 10)
        exact = np.sin(np.pi * z) / np.pi
        errs = [np.max(np.abs(product_generating_function(g, R)(z) - exact)) for R in (100, 200, 400, 800, 1600, 3200)]
        assert all(b < a for a, b in zip(errs, errs[1:]))

    def test_derivatives_near_origin(self):
        # truncation error of S'(x_k) grows like exp(k^2/R); the closed form is matched near 0
        g = uniform_grid(1.0, 900)
        labels = np.arange(-3, 4)
        rel = []
        for R in (200, 400, 800):
            P = product_generating_function(g, R)
            d = np.array([P.deriv_at_node(k) for k in labels])
            rel.append(np.max(np.abs(d / (-1.0) ** labels - 1)))
        assert rel[0] < 0.05
        assert rel[1] < rel[0] and rel[2] < rel[1]

    def test_radius_beyond_window(self):
        with pytest.raises(GridError, match="insufficient nodes"):
            product_generating_function(uniform_grid(1.0, 10), 50)

    def test_wide_window_near_origin_finite(self):
        g = uniform_grid(1.0, 2000)
        P = product_generating_function(g, 1999)
        d = P.node_derivatives
        k = g.labels
        near = np.abs(k) <= 20
        assert np.all(np.isfinite(d[near]))
        rel = np.abs(d[near] / (-1.0) ** k[near] - 1)
        assert np.all(rel <= 1.05 * np.expm1(k[near] ** 2 / 1999.0) + 1e-12)
        assert np.all(np.isnan(d[np.abs(g.nodes) >= 1999]))


class TestSineType:
    def test_uniform_passes(self):
        g = uniform_grid(1.0, 30)
        r = verify_sine_type(generating_function(g), g, 0.25, (-10, 10, -5, 5))
        assert r.passed
        assert r.c1 >= math.sin(math.pi * 0.25) / (2 * math.pi) * 0.5
        assert r.c1 <= r.c2

    def test_vanishing_epsilon_fails(self):
        g = uniform_grid(1.0, 30)
        r = verify_sine_type(generating_function(g), g, 1e-9, (-10, 10, -1, 1), step=0.05)
        assert not r.passed and r.c1 < 1e-6

    @pytest.mark.parametrize("make", [lambda: bessel_grid(0.1, 30), lambda: union_grid(1.0, 0.4, 30)])
    def test_closed_forms_pass(self, make):
        g = make()
        r = verify_sine_type(generating_function(g), g, 0.05, (-10, 10, -4, 4))
        assert r.passed and np.isfinite(r.c2)

    def test_no_admissible_points(self):
        g = uniform_grid(1.0, 30)
        with pytest.raises(GridError, match="no test points"):
            verify_sine_type(generating_function(g), g, 5.0, (-2, 2, 0, 0))

    def test_constant_function_rejected_upstream(self):
        g = uniform_grid(1.0, 5)
        with pytest.raises(GridError, match="does not vanish"):
            CallableGeneratingFunction(g, lambda z: np.ones_like(np.asarray(z, float)), np.ones(len(g)), 0.0)


class TestDensity:
    def test_uniform(self):
        assert lower_uniform_density(uniform_grid(1.0, 100), 10) == 1.0

    def test_sparse_sequence(self):
        n = np.arange(-12, 13)
        x = 3.0 * 2.0 ** np.abs(n) * np.sign(n)
        g = explicit_grid(x)
        span = g.nodes[-1] - g.nodes[0]
        assert lower_uniform_density(g, span / 2) < 0.01

    def test_gap_wider_than_interval(self):
        g = explicit_grid([-10.0, -1.0, 0.0, 5.0, 20.0])
        assert lower_uniform_density(g, 3.0) == 0.0

    @given(st.floats(min_value=0.5, max_value=4), st.floats(min_value=2, max_value=30))
    @settings(max_examples=50, deadline=None)
    def test_uniform_density_is_b(self, b, r):
        d = lower_uniform_density(uniform_grid(b, 200), r)
        assert abs(d - b) <= 1.0 / r + 1e-12


@given(st.lists(st.floats(min_value=-1e3, max_value=1e3), min_size=2, max_size=40, unique=True))
@settings(max_examples=100)
def test_explicit_grid_invariants(xs):
    xs = np.array(xs)
    if np.min(np.diff(np.sort(xs))) <= 0:
        return
    g = explicit_grid(xs)
    assert g.separation > 0 and np.isfinite(g.max_gap)
    assert g.labels[g.nodes >= 0][0] == 0 if np.any(g.nodes >= 0) else True
