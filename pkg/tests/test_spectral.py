"""Partial sums, ramps, edge-augmented sums and error metrics."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from strategies import jump_sets

from gibbsfree.errors import CardinalityMismatch, DegenerateFit, NonRealResult
from gibbsfree.functions import (
    JumpSet,
    PiecewiseFnSpec,
    Piece,
    Spectrum1D,
    Term,
    fourier_coeffs_exact,
    ramp_spectrum,
    ramp_sum_spec,
)
from gibbsfree.prony import PronyConfig, prony_estimate
from gibbsfree.spectral import (
    SampledFunction,
    away_grid,
    coefficient_bound_error,
    convergence_slope,
    decay_constant,
    distance_to_jumps,
    edge_augmented_sum,
    edge_error,
    est_coeffs,
    estimated_jump_budget,
    l2_error,
    match_jump_sets,
    parseval_tail,
    partial_sum,
    ramp_eval,
    ramp_sum_eval,
    standard_error,
    tail_form_check,
    uniform_grid,
    values_of,
)

PI = math.pi
NS = (16, 32, 64, 128, 256, 512)


class TestPartialSum:
    def test_constant(self):
        c = np.zeros(9, dtype=complex)
        c[4] = 2.5
        out = partial_sum(Spectrum1D(c), uniform_grid(33))
        np.testing.assert_allclose(out.values, 2.5, atol=1e-15)

    def test_matches_direct_loop(self, h50):
        x = np.linspace(-3, 3, 17)
        ref = oracles.direct_sum(h50.coeffs, h50.k, x).real
        np.testing.assert_allclose(partial_sum(h50, x).values, ref, atol=1e-12)

    def test_gibbs_overshoot_persists(self, h):
        c = fourier_coeffs_exact(h, 100)
        x = np.linspace(-PI / 2 - 0.2, -PI / 2, 4001)
        over = np.max(partial_sum(c, x).values) - 1.5
        assert over > 0.03 * 1.5

    def test_ramp_sum_far_from_jumps(self):
        js = JumpSet([-2.0, 0.3, 2.7], [0.5, -1.25, 2.0])
        c = ramp_spectrum(js, 512)
        # the Dirichlet tail near a jump is about |a| / (pi N d), so "far" means d >= 0.25
        x = away_grid(js, 1024, margin=0.25)
        np.testing.assert_allclose(partial_sum(c, x).values, ramp_sum_eval(js, x), atol=1e-2)

    def test_asymmetric_spectrum_rejected(self):
        c = np.zeros(5, dtype=complex)
        c[3] = 1.0
        with pytest.raises(NonRealResult):
            partial_sum(Spectrum1D(c), uniform_grid(8))

    def test_noisy_spectrum_warns_only(self):
        c = np.zeros(5, dtype=complex)
        c[3] = 1.0
        with pytest.warns(UserWarning):
            partial_sum(Spectrum1D(c, noisy=True), uniform_grid(8))

    def test_unsorted_grid_gives_array(self, h50):
        x = np.array([0.5, -0.5, 0.1])
        out = partial_sum(h50, x)
        assert isinstance(out, np.ndarray)
        np.testing.assert_allclose(out, values_of(partial_sum(h50, np.sort(x)))[[2, 0, 1]])

    def test_pointwise_convergence_at_jump(self, h):
        errs = [abs(partial_sum(fourier_coeffs_exact(h, N), np.array([-PI / 2])).values[0] - 0.75)
                for N in (64, 256, 1024)]
        assert errs[0] > errs[1] > errs[2]


class TestRamp:
    @given(st.floats(-3.0, 3.0))
    def test_unit_jump(self, xj):
        e = 1e-9
        assert ramp_eval(xj, xj + e) - ramp_eval(xj, xj - e) == pytest.approx(1.0, abs=1e-8)
        assert ramp_eval(xj, xj) == pytest.approx(-xj / (2 * PI))

    def test_values_at_origin(self):
        assert ramp_eval(0.0, PI / 2) == pytest.approx(0.25)
        assert ramp_eval(0.0, -PI / 2) == pytest.approx(-0.25)

    @given(st.floats(-3.0, 3.0), st.floats(-PI + 1e-6, PI))
    def test_matches_oracle(self, xj, x):
        if abs(x - xj) < 1e-12:
            return
        assert ramp_eval(xj, x) == pytest.approx(float(oracles.ramp(xj, x)), abs=1e-14)


class TestEstCoeffs:
    def test_empty(self):
        assert np.all(est_coeffs(JumpSet(), 10).coeffs == 0)

    @given(st.floats(-3.0, 3.0))
    def test_single_unit_jump(self, xj):
        c = est_coeffs(JumpSet([xj], [1.0]), 9)
        k = np.arange(1, 10)
        np.testing.assert_allclose(c.positive(), np.exp(-1j * k * xj) / (2j * PI * k), atol=1e-15)
        assert c.coeff(0) == 0

    def test_matches_oracle(self, h_jumps):
        c = est_coeffs(h_jumps, 8)
        for k in (-8, -1, 1, 4):
            assert abs(c.coeff(k) - oracles.ramp_coeff(h_jumps.locations, h_jumps.heights, k)) < 1e-15

    def test_h_residual_at_seven(self, h, h_jumps):
        N = 512
        c = fourier_coeffs_exact(h, N)
        res = c - est_coeffs(h_jumps, N)
        k = np.arange(1, N + 1)
        C = np.max(np.abs(res.positive()) * k**2)
        assert abs(res.coeff(7)) * 49 <= C
        # the residual is genuinely second order
        assert np.max(np.abs(res.positive()[255:]) * k[255:] ** 2) < 10


class TestEdgeAugmented:
    @given(jump_sets(), st.integers(1, 40))
    def test_empty_jumps_equal_partial_sum(self, js, N):
        c = ramp_spectrum(js, N)
        x = uniform_grid(64)
        assert np.array_equal(edge_augmented_sum(c, JumpSet(), x).values, partial_sum(c, x).values)

    @given(jump_sets(), st.integers(1, 64))
    def test_exact_on_ramp_sums(self, js, N):
        spec = ramp_sum_spec(js)
        c = fourier_coeffs_exact(spec, N)
        x = uniform_grid(512)
        x = x[distance_to_jumps(x, js) >= 1e-6]
        err = np.abs(edge_augmented_sum(c, js, x).values - spec(x))
        assert np.max(err) <= 1e-12 * max(1.0, np.max(np.abs(js.heights)))

    def test_h_twenty_beats_partial_sum_hundred(self, h, h_jumps):
        x = away_grid(h_jumps)
        edge = np.max(np.abs(edge_augmented_sum(fourier_coeffs_exact(h, 20), h_jumps, x).values - h(x)))
        std = np.max(np.abs(partial_sum(fourier_coeffs_exact(h, 100), x).values - h(x)))
        assert edge < std

    def test_tail_form_empty(self, h50):
        assert tail_form_check(h50, JumpSet(), uniform_grid(16), 1000) == 0.0

    def test_tail_form_h(self, h, h_jumps):
        c = fourier_coeffs_exact(h, 20)
        assert tail_form_check(c, h_jumps, away_grid(h_jumps, 512), 10_000) <= 5e-3

    def test_tail_form_decreases(self):
        js = JumpSet([0.4], [1.0])
        c = ramp_spectrum(js, 20)
        x = away_grid(js, 256)
        assert tail_form_check(c, js, x, 20_000) < tail_form_check(c, js, x, 10_000)

    def test_tail_form_needs_band(self, h50, h_jumps):
        with pytest.raises(ValueError):
            tail_form_check(h50, h_jumps, uniform_grid(8), 10)


class TestErrors:
    def test_exact_reconstruction_is_zero(self, h):
        assert l2_error(h, h) == 0.0

    def test_norm_convention(self):
        one = PiecewiseFnSpec((Piece(-PI, PI, (Term.poly(1.0),)),))
        zero = lambda x: np.zeros_like(x)
        assert l2_error(one, zero) == pytest.approx(1.0, abs=1e-14)

    def test_standard_error_ratio(self, h):
        r = standard_error(h, 128) / standard_error(h, 32)
        assert r == pytest.approx(0.5, rel=0.25)

    @pytest.mark.parametrize("N", [16, 64])
    def test_parseval_tail(self, h, N):
        assert standard_error(h, N) == pytest.approx(parseval_tail(h, N), rel=1e-3)

    def test_slope_exact_power(self):
        Ns = np.array([4, 8, 16, 32, 64])
        assert convergence_slope(Ns, 3.0 / Ns) == pytest.approx(-1.0, abs=1e-12)

    @pytest.mark.parametrize(
        "Ns,errs", [((1, 2, 3), (1, 1, 1)), ((1, 2, 3, 4), (1, 0, 1, 1)), ((1, 3, 2, 4), (1, 1, 1, 1))]
    )
    def test_degenerate_fit(self, Ns, errs):
        with pytest.raises(DegenerateFit):
            convergence_slope(Ns, errs)

    def test_standard_slope(self, h):
        assert convergence_slope(NS, [standard_error(h, N) for N in NS]) == pytest.approx(-0.5, abs=0.1)

    def test_edge_slope_true_jumps(self, h, h_jumps):
        assert convergence_slope(NS, [edge_error(h, N, h_jumps) for N in NS]) == pytest.approx(-1.5, abs=0.15)

    def test_scaled_errors_bounded(self, h, h_jumps):
        edge = np.array([edge_error(h, N, h_jumps) * N**1.5 for N in NS])
        std = np.array([standard_error(h, N) * N**0.5 for N in NS])
        assert edge.max() / edge.min() < 3
        assert std.max() / std.min() < 3

    @pytest.mark.parametrize("p", [1, 2])
    def test_coefficient_bound_holds(self, h, h_jumps, p):
        N = 64
        c = fourier_coeffs_exact(h, 4096)
        if p == 2:
            c = c - ramp_spectrum(h_jumps, 4096)
        const = decay_constant(c, p)
        tail = np.abs(c.k) > N
        assert math.sqrt(np.sum(np.abs(c.coeffs[tail]) ** 2)) <= coefficient_bound_error(const, N, p)

    def test_bound_needs_decay(self):
        with pytest.raises(ValueError):
            coefficient_bound_error(1.0, 10, 0.5)

    def test_estimated_jump_budget(self, h, h_jumps):
        N = 64
        c = fourier_coeffs_exact(h, N)
        c_tilde = decay_constant(c - ramp_spectrum(h_jumps, N), 2)
        signs = (-1.0) ** np.arange(len(h_jumps))
        for eps in (1e-4, 1e-3, 1e-2, 1e-1):
            for delta in (1e-4, 1e-3, 1e-2, 1e-1):
                est = JumpSet(h_jumps.locations + eps * signs, h_jumps.heights + delta * signs)
                err = edge_error(h, N, est, c)
                assert err <= estimated_jump_budget(c_tilde, N, h_jumps, eps, delta)


class TestMatching:
    def test_identity(self, h_jumps):
        e = match_jump_sets(h_jumps, h_jumps)
        assert (e.eps_location, e.delta_height) == (0.0, 0.0)

    def test_single_pair(self):
        e = match_jump_sets(JumpSet([0.0], [1.0]), JumpSet([0.01], [0.98]))
        assert e.eps_location == pytest.approx(0.01)
        assert e.delta_height == pytest.approx(0.02)

    def test_pairs_across_pi(self):
        e = match_jump_sets(JumpSet([PI], [1.0]), JumpSet([-PI + 0.01], [1.0]))
        assert e.eps_location == pytest.approx(0.01)

    def test_cardinality_mismatch(self, h_jumps):
        with pytest.raises(CardinalityMismatch) as info:
            match_jump_sets(h_jumps, JumpSet([0.0], [1.0]))
        assert (info.value.n_truth, info.value.n_estimate) == (6, 1)

    def test_small_estimates_filtered(self):
        e = match_jump_sets(JumpSet([0.0], [1.0]), JumpSet([0.0, 1.0], [1.0, 1e-6]), min_height=1e-3)
        assert e.eps_location == 0.0

    @pytest.mark.xfail(
        reason="measured 1.42e-3: the leading-order model carries an O(1/k) bias at N = 50", strict=True
    )
    def test_prony_h_fifty(self, h, h_jumps, h50):
        e = match_jump_sets(h_jumps, prony_estimate(h50, PronyConfig(order=6)))
        assert e.eps_location <= 1e-3


class TestSampledFunction:
    def test_csv_round_trip(self):
        s = SampledFunction([-1.0, 0.0, 2.0], [0.1, 0.2, 0.3])
        text = s.to_csv()
        assert text.splitlines()[0] == "x,value"
        back = SampledFunction.from_csv(text)
        assert np.array_equal(back.grid, s.grid) and np.array_equal(back.values, s.values)

    def test_invariants(self):
        with pytest.raises(ValueError):
            SampledFunction([0.0, 0.0], [1.0, 2.0])
        with pytest.raises(ValueError):
            SampledFunction([0.0, 1.0], [1.0])

    def test_uniform_grid(self):
        x = uniform_grid(8)
        assert x[0] == -PI and x[-1] < PI
        np.testing.assert_allclose(np.diff(x), 2 * PI / 8)
