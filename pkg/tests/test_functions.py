"""Piecewise specs, jump sets, 1D/2D coefficients and their serialisations."""

import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gibbsfree.errors import InsufficientNodes, ShapeOutOfDomain
from gibbsfree.functions import (
    CORPUS,
    Box,
    Disc,
    JumpSet,
    Piece,
    PiecewiseFnSpec,
    Spectrum1D,
    Spectrum2D,
    Term,
    eval_piecewise,
    fourier_coeffs_2d_exact,
    fourier_coeffs_2d_quadrature,
    fourier_coeffs_exact,
    fourier_coeffs_quadrature,
    function_f1,
    function_f2,
    function_s,
    get_function,
    jump_set_of,
    ramp_spectrum,
    ramp_sum_spec,
    wrap,
    zero_function,
)

import oracles
from strategies import jump_sets

PI = math.pi


class TestEvaluation:
    def test_h_interior_of_sinusoid_piece(self, h):
        assert eval_piecewise(h, 0.0) == pytest.approx(7 / 4 + math.sin(-1 / 4), abs=1e-15)

    def test_h_one_sided_at_first_jump(self, h):
        assert eval_piecewise(h, -3 * PI / 4, side="right") == 1.5
        assert eval_piecewise(h, -3 * PI / 4, side="left") == 0.0
        assert eval_piecewise(h, -3 * PI / 4, side="average") == 0.75

    def test_zero_function(self):
        z = zero_function()
        assert np.all(eval_piecewise(z, np.linspace(-10, 10, 101)) == 0.0)

    @given(st.floats(-PI + 1e-6, PI - 1e-6))
    def test_modes_agree_inside_pieces(self, x):
        h = CORPUS["h"]()
        if np.min(np.abs(h.breakpoints - x)) < 1e-9:
            return
        vals = [eval_piecewise(h, x, side=s) for s in ("left", "right", "average")]
        assert vals[0] == pytest.approx(vals[1], abs=1e-12)
        assert vals[2] == pytest.approx(vals[0], abs=1e-12)
        assert vals[0] == pytest.approx(oracles.h_value(x), abs=1e-12)

    def test_periodic_wrapping(self, h):
        x = np.linspace(-PI + 0.01, PI - 0.01, 37)
        np.testing.assert_allclose(h(x + 2 * PI), h(x), atol=1e-12)
        np.testing.assert_allclose(h(x - 6 * PI), h(x), atol=1e-12)

    def test_wrap_range(self):
        x = wrap(np.array([-PI, PI, 3 * PI, -3 * PI + 0.1]))
        assert np.all(x > -PI) and np.all(x <= PI)
        assert x[0] == pytest.approx(PI)


class TestSpecValidation:
    def test_gaps_rejected(self):
        with pytest.raises(ValueError):
            PiecewiseFnSpec((Piece(-PI, 0.0), Piece(0.5, PI)))

    def test_must_cover_period(self):
        with pytest.raises(ValueError):
            PiecewiseFnSpec((Piece(-PI, 0.0),))

    def test_json_round_trip(self, h):
        text = h.to_json()
        back = PiecewiseFnSpec.from_json(text)
        x = np.linspace(-PI, PI, 201)
        np.testing.assert_array_equal(back(x), h(x))
        assert back.to_json() == text

    def test_json_single_kind_layout(self):
        spec = PiecewiseFnSpec((Piece(-PI, PI, (Term.poly(1.0, 2.0),)),))
        doc = json.loads(spec.to_json())
        assert doc["pieces"][0]["interval"] == [-PI, PI]
        assert doc["pieces"][0]["kind"] == "poly"
        assert doc["pieces"][0]["coeffs"] == [1.0, 2.0]


class TestJumpSets:
    def test_h_locations(self, h_jumps):
        locs, _ = oracles.h_jumps()
        np.testing.assert_allclose(h_jumps.locations, locs, atol=1e-15)

    def test_h_heights(self, h_jumps):
        _, hgt = oracles.h_jumps()
        np.testing.assert_allclose(h_jumps.heights, hgt, atol=1e-13)
        # the closed forms written out by hand
        assert h_jumps.heights[2] == pytest.approx(7 / 4 + PI / 8 + math.sin(-PI / 4 - 1 / 4), abs=1e-14)
        assert h_jumps.heights[4] == pytest.approx(33 * PI / 32 - 5, abs=1e-14)
        assert h_jumps.heights[5] == pytest.approx(5 - 33 * PI / 16, abs=1e-14)

    def test_s_has_jump_at_pi(self):
        j = jump_set_of(function_s())
        np.testing.assert_allclose(j.locations, [-PI / 2, PI / 2, PI])
        assert j.heights[2] == pytest.approx(PI**2 - math.exp(4) * PI)

    def test_continuous_spec_has_no_jumps(self):
        spec = PiecewiseFnSpec((Piece(-PI, PI, (Term.poly(2.0, 0.0, 1.0),)),))
        assert len(jump_set_of(spec)) == 0
        assert len(jump_set_of(CORPUS["smooth"]())) == 0

    @given(jump_sets())
    def test_ramp_sum_builder_round_trip(self, js):
        back = jump_set_of(ramp_sum_spec(js))
        np.testing.assert_allclose(back.locations, js.locations, atol=1e-15)
        np.testing.assert_allclose(back.heights, js.heights, rtol=1e-12, atol=1e-12)

    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            JumpSet([0.1, 0.1], [1.0, 2.0])
        with pytest.raises(ValueError):
            JumpSet([0.1], [0.0])
        js = JumpSet([2.0, -1.0, 3 * PI], [1.0, 2.0, 3.0])
        assert np.all(np.diff(js.locations) > 0)
        assert js.locations[-1] == pytest.approx(PI)

    def test_csv_round_trip(self, h_jumps):
        text = h_jumps.to_csv()
        assert text.splitlines()[0] == "location,height"
        assert JumpSet.from_csv(text) == h_jumps


class TestCoefficients:
    def test_zero_function(self):
        for N in (1, 7, 64):
            assert np.all(fourier_coeffs_exact(zero_function(), N).coeffs == 0)
        assert np.all(fourier_coeffs_quadrature(zero_function(), 8).coeffs == 0)

    @pytest.mark.parametrize("k", [0, 1, 2, 7, 31, 50, -13])
    def test_h_against_mpmath(self, h, k):
        c = fourier_coeffs_exact(h, 50).coeff(k)
        assert abs(c - oracles.coeff_mp(oracles.h_pieces(), k)) < 1e-13

    @pytest.mark.parametrize("k", [0, 3, -40])
    def test_s_against_mpmath(self, k):
        c = fourier_coeffs_exact(function_s(), 40).coeff(k)
        ref = oracles.coeff_mp(oracles.s_pieces(), k)
        assert abs(c - ref) < 1e-12 * max(1.0, abs(ref)) * 100

    def test_h_exact_matches_quadrature_at_50(self, h):
        a = fourier_coeffs_exact(h, 50).coeffs
        b = fourier_coeffs_quadrature(h, 50, 256).coeffs
        assert np.max(np.abs(a - b)) < 1e-10

    def test_h_exact_matches_quadrature_at_20(self, h):
        a = fourier_coeffs_exact(h, 20).coeffs
        b = fourier_coeffs_quadrature(h, 20, 256).coeffs
        assert np.max(np.abs(a - b)) < 1e-10

    @pytest.mark.parametrize("name", sorted(CORPUS))
    def test_oracle_equivalence_corpus(self, name):
        f = get_function(name)
        a = fourier_coeffs_exact(f, 128).coeffs
        b = fourier_coeffs_quadrature(f, 128, 256).coeffs
        assert np.max(np.abs(a - b)) <= 1e-9

    @pytest.mark.parametrize("name", sorted(CORPUS))
    def test_conjugate_symmetry(self, name):
        assert fourier_coeffs_exact(get_function(name), 100).is_conjugate_symmetric(1e-12)

    def test_s_quadrature_conjugate_symmetric(self):
        assert fourier_coeffs_quadrature(function_s(), 20, 256).is_conjugate_symmetric(1e-12)

    def test_quadrature_refuses_too_few_nodes(self, h):
        with pytest.raises(InsufficientNodes):
            fourier_coeffs_quadrature(h, 20, 31)
        with pytest.raises(InsufficientNodes):
            fourier_coeffs_quadrature(h, 200, 128)

    def test_unit_ramp_at_origin(self):
        spec = ramp_sum_spec(JumpSet([0.0], [1.0]))
        c = fourier_coeffs_exact(spec, 16)
        k = np.arange(1, 17)
        np.testing.assert_allclose(c.positive(), 1 / (2j * PI * k), atol=1e-15)
        assert abs(c.coeff(0)) < 1e-16

    @given(st.floats(-3.0, 3.0))
    def test_unit_ramp_spectrum(self, xj):
        spec = ramp_sum_spec(JumpSet([xj], [1.0]))
        c = fourier_coeffs_exact(spec, 12)
        for k in (-12, -1, 1, 5, 12):
            assert abs(c.coeff(k) - np.exp(-1j * k * xj) / (2j * PI * k)) < 1e-14
        # the ramp's mean is -x_j / 2pi
        assert c.coeff(0) == pytest.approx(-xj / (2 * PI), abs=1e-14)
        np.testing.assert_allclose(ramp_spectrum(JumpSet([xj], [1.0]), 12).coeffs, c.coeffs, atol=1e-14)

    @pytest.mark.parametrize("f", [CORPUS["h"], function_s])
    def test_coefficient_decay_model(self, f):
        spec = f()
        j = jump_set_of(spec)
        c = fourier_coeffs_exact(spec, 512)
        k = np.arange(1, 513)
        model = (np.exp(-1j * np.outer(k, j.locations)) @ j.heights) / (2j * PI * k)
        scaled = np.abs(c.positive() - model) * k**2
        # bounded: the tail does not grow relative to the first half
        assert np.max(scaled[256:]) <= 1.5 * np.max(scaled[:256])

    def test_spectrum_csv_round_trip(self, h):
        c = fourier_coeffs_exact(h, 5)
        text = c.to_csv()
        assert text.splitlines()[0] == "k,re,im"
        assert text.splitlines()[1].startswith("-5,")
        np.testing.assert_array_equal(Spectrum1D.from_csv(text).coeffs, c.coeffs)

    def test_spectrum_invariants(self):
        with pytest.raises(ValueError):
            Spectrum1D(np.zeros(4))
        assert Spectrum1D.zeros(3).coeffs.size == 7


class TestTwoDimensional:
    def test_f1_mean(self):
        c = fourier_coeffs_2d_exact(function_f1(), 8)
        assert c.coeff(0, 0) == pytest.approx(1 / PI**2, abs=1e-15)

    @pytest.mark.parametrize("k", [1, 2, 5, -3])
    def test_f1_axis_coefficient(self, k):
        c = fourier_coeffs_2d_exact(function_f1(), 8)
        assert c.coeff(k, 0) == pytest.approx(math.sin(k) / (PI * k) / PI, abs=1e-15)

    def test_f2_terms_match_quadrature(self):
        for shape in [function_f1()] + list(function_f2().shapes):
            a = fourier_coeffs_2d_exact(shape, 25).coeffs
            b = fourier_coeffs_2d_quadrature(shape, 25).coeffs
            assert np.max(np.abs(a - b)) <= 1e-8

    def test_disc_closed_form(self):
        from scipy.special import j1

        d = Disc(0.5, 1.0, 1.0)
        c = fourier_coeffs_2d_exact(d, 4)
        k, l = 3, -2
        q = math.hypot(k, l)
        ref = np.exp(-1j * (k * 0.5 + l * 1.0)) * j1(q) / (2 * PI * q)
        assert abs(c.coeff(k, l) - ref) < 1e-15
        assert c.coeff(0, 0) == pytest.approx(PI / (4 * PI**2))

    def test_real_image_symmetry(self):
        assert fourier_coeffs_2d_exact(function_f2(), 20).symmetry_defect() <= 1e-12

    def test_shapes_outside_domain(self):
        with pytest.raises(ShapeOutOfDomain):
            fourier_coeffs_2d_exact(Box(-4.0, 1.0, -1.0, 1.0), 4)
        with pytest.raises(ShapeOutOfDomain):
            fourier_coeffs_2d_exact(Disc(2.5, 0.0, 1.0), 4)

    def test_csv_round_trip(self):
        c = fourier_coeffs_2d_exact(function_f2(), 3)
        text = c.to_csv()
        assert text.splitlines()[0] == "k,l,re,im"
        np.testing.assert_array_equal(Spectrum2D.from_csv(text).coeffs, c.coeffs)
