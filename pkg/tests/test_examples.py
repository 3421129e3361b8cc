import math

import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from bandlim.analysis import SampledFunction, one_sided_average
from bandlim.examples import (
    G1_AT_MINUS_HALF,
    NAMED_FUNCTIONS,
    boche_monich_samples,
    eval_g1,
    eval_g3,
    g1_samples,
    g2_realization,
    g3_plus_derivative,
    g3_plus_exponentials,
    gauss_reference,
    realization_generator,
)
from bandlim.experiments import tent_sum_average
from bandlim.specfun import EULER_GAMMA

SQRT3_2 = math.sqrt(3) / 2


class TestG1:
    def test_integer_values(self):
        k = np.arange(0, 60)
        assert np.array_equal(eval_g1(k.astype(float)), np.where(k % 2 == 0, np.pi, -np.pi))
        assert np.all(eval_g1(-np.arange(1, 60, dtype=float)) == 0.0)

    def test_against_scipy_away_from_integers(self):
        t = np.linspace(-40, 40, 8001) + 1e-3
        ref = np.sin(np.pi * t) * sp.digamma(-t)
        assert np.max(np.abs(eval_g1(t) - ref)) < 1e-9

    def test_continuous_through_removable_points(self):
        for k in (0, 1, 5, 30):
            h = np.array([-1e-7, 1e-7])
            assert np.max(np.abs(eval_g1(k + h) - (-1) ** k * np.pi)) < 1e-5

    def test_value_at_minus_half(self):
        assert abs(eval_g1(-0.5) - G1_AT_MINUS_HALF) < 1e-14
        assert abs(G1_AT_MINUS_HALF - (EULER_GAMMA + 2 * math.log(2))) == 0

    def test_gauss_symmetry(self):
        k = np.arange(1, 31)
        assert np.max(np.abs(eval_g1(k - 0.5) - eval_g1(-k - 0.5))) < 1e-9

    def test_samples(self):
        grid, s = g1_samples(20)
        assert grid.extra_node == -0.5
        assert s.extra_value == pytest.approx(G1_AT_MINUS_HALF, abs=1e-15)
        assert np.array_equal(s.values, eval_g1(grid.nodes))

    def test_complex_argument(self):
        z = np.array([2.3 + 0.7j, -4.1 - 1.2j])
        ref = np.sin(np.pi * z) * sp.digamma(-z)
        assert np.allclose(eval_g1(z), ref, rtol=1e-12)


class TestGaussReference:
    def test_small_values(self):
        assert gauss_reference(1) == -2.0
        assert abs(gauss_reference(2) - 8.0 / 3.0) < 1e-15

    def test_constant_free_combination(self):
        # G1(k - 1/2) = (-1)^(k+1) (H_{k-1} + sum 2/m + C), so this combination is -C
        k = np.arange(1, 31)
        d = (-1.0) ** k * eval_g1(k - 0.5) + np.array([gauss_reference(int(j)) * (-1) ** j for j in k])
        assert np.var(d) < 1e-9

    def test_literal_sign_is_not_constant(self):
        # the opposite sign on the reference varies with k; recorded for clarity
        k = np.arange(1, 31)
        d = (-1.0) ** k * eval_g1(k - 0.5) - np.array([gauss_reference(int(j)) * (-1) ** j for j in k])
        assert np.var(d) > 1.0

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            gauss_reference(0)


class TestG3:
    def test_zero_and_oddness(self):
        assert eval_g3(0.0) == 0.0
        rng = np.random.default_rng(0)
        z = rng.uniform(-1e4, 1e4, 500)
        assert np.max(np.abs(eval_g3(-z) + eval_g3(z))) < 1e-12

    def test_functional_equation(self):
        z = np.random.default_rng(1).uniform(-50, 50, 200)
        res = eval_g3(2 * z) - np.sin(2 * np.pi * z / 3) + eval_g3(z)
        assert np.max(np.abs(res)) < 1e-10

    def test_powers_of_two(self):
        n = np.arange(2, 21)
        vals = (-1.0) ** n * eval_g3(2.0**n)
        assert np.max(np.abs(vals - (eval_g3(1.0) - SQRT3_2 * n))) < 1e-9

    def test_printed_offset_reads_g3_of_four(self):
        # the form with (n - 2) holds when its intercept is G3(4) = G3(1) - sqrt(3)
        n = np.arange(2, 21)
        vals = (-1.0) ** n * eval_g3(2.0**n)
        assert abs(eval_g3(4.0) - (eval_g3(1.0) - math.sqrt(3))) < 1e-12
        assert np.max(np.abs(vals - (eval_g3(4.0) - SQRT3_2 * (n - 2)))) < 1e-9

    def test_three_times_powers(self):
        n = np.arange(1, 13)
        assert np.max(np.abs(eval_g3(3.0 * 2.0**n) - (-1.0) ** n * eval_g3(3.0))) < 1e-9

    def test_bounded_on_sparse_sequence(self):
        n = np.arange(-12, 13)
        vals = eval_g3(3.0 * 2.0 ** np.abs(n) * np.sign(n))
        assert np.max(np.abs(vals)) <= abs(eval_g3(3.0)) + 1e-9

    def test_tolerance_controls_error(self):
        z = np.linspace(-1e3, 1e3, 101)
        ref = eval_g3(z, tol=1e-16)
        for tol in (1e-3, 1e-6, 1e-10):
            assert np.max(np.abs(eval_g3(z, tol) - ref)) <= tol

    def test_plus_derivative_on_real_axis(self):
        t = np.linspace(-30, 30, 61)
        h = 1e-5
        d_g3 = (eval_g3(t + h) - eval_g3(t - h)) / (2 * h)
        # G3+(t) = (1/2i) sum (-1)^k e^{i lam_k t} has real part (1/2) G3(t)
        assert np.max(np.abs(g3_plus_derivative(t).real - 0.5 * d_g3)) < 1e-8

    def test_exponential_coefficients(self):
        coef, lam = g3_plus_exponentials(10, derivative=True)
        c0, _ = g3_plus_exponentials(10)
        assert np.allclose(coef, c0 * 1j * lam)
        assert lam[0] == pytest.approx(np.pi / 3)

    def test_named(self):
        assert NAMED_FUNCTIONS["g3"].declared_type == pytest.approx(np.pi / 3)
        assert NAMED_FUNCTIONS["g1"].eval(0.0) == np.pi


class TestBocheMonich:
    def test_values(self):
        g, s = boche_monich_samples(10)
        assert s.values[g.position_of(1)] == pytest.approx(-1 / math.log(2))
        assert s.values[g.position_of(4)] == pytest.approx(1 / math.log(5))
        assert s.values[g.position_of(-3)] == 0.0
        assert g.extra_node == 0.5 and s.extra_value == 0.0

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            boche_monich_samples(0)


class TestG2:
    def test_support(self):
        _, s = g2_realization(0.5, 3, 1000)
        assert np.all(np.abs(s.values) <= 0.5) and abs(s.extra_value) <= 0.5

    def test_deterministic(self):
        _, a = g2_realization(0.5, 3, 500, 7)
        _, b = g2_realization(0.5, 3, 500, 7)
        assert np.array_equal(a.values, b.values) and a.extra_value == b.extra_value

    def test_prefix_property(self):
        _, small = g2_realization(0.5, 9, 100, 2)
        _, big = g2_realization(0.5, 9, 400, 2)
        assert np.array_equal(big.values[300:501], small.values)
        assert big.extra_value == small.extra_value

    def test_streams_independent_of_order(self):
        first = [g2_realization(1.0, 1, 50, i)[1].values for i in range(5)]
        again = [g2_realization(1.0, 1, 50, i)[1].values for i in reversed(range(5))][::-1]
        assert all(np.array_equal(x, y) for x, y in zip(first, again))
        assert not np.array_equal(first[0], first[1])

    def test_sample_mean(self):
        alpha, K = 0.5, 10_000
        _, s = g2_realization(alpha, 0, K)
        assert abs(np.mean(s.values)) < 3 * alpha / math.sqrt(3 * (2 * K + 1))

    def test_one_sided(self):
        g, s = g2_realization(0.5, 0, 100, one_sided=True)
        assert np.all(s.values[g.labels <= 0] == 0) and s.extra_value == 0.0
        assert np.all(s.values[g.labels > 0] != 0)

    def test_generator_key(self):
        a = realization_generator(1, 2, 3).random(4)
        b = realization_generator(1, 2, 3).random(4)
        c = realization_generator(1, 2, 4).random(4)
        assert np.array_equal(a, b) and not np.array_equal(a, c)

    @given(st.integers(min_value=0, max_value=2**32 - 1), st.floats(min_value=0.01, max_value=10))
    @settings(max_examples=30, deadline=None)
    def test_support_property(self, seed, alpha):
        _, s = g2_realization(alpha, seed, 20)
        assert s.norm_inf <= alpha


def test_g1_tent_lower_bound():
    r_max = 200.0
    dt = 0.01
    t = -r_max + dt * np.arange(int(round(r_max / dt)) + 1)
    f = SampledFunction(-r_max, dt, eval_g1(t))
    for r, avg in one_sided_average(f, (50, 100, 200)):
        assert avg >= tent_sum_average(r)
