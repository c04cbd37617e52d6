"""Complex Gaussian coefficient noise, seeding and trial sweeps."""

import math

import numpy as np
import pytest

from gibbsfree.errors import ZeroSignal
from gibbsfree.functions import Spectrum1D, fourier_coeffs_exact
from gibbsfree.noise import (
    SWEEP_COLUMNS,
    NoiseSpec,
    add_noise,
    derive_seed,
    empirical_snr_db,
    noise_sweep,
    noise_variance,
    splitmix64,
    sweep_to_csv,
)
from gibbsfree.pipeline import make_estimator
from gibbsfree.prony import PronyConfig
from gibbsfree.spectral import convergence_slope, match_jump_sets

SWEEP_NS = (25, 50, 100, 200)


@pytest.fixture(scope="module")
def estimators():
    return {"concentration": make_estimator("concentration"),
            "prony": make_estimator("prony", prony=PronyConfig(order=6))}


@pytest.fixture(scope="module")
def sweeps(estimators):
    from gibbsfree.functions import function_h

    h = function_h()
    return {
        (name, snr): noise_sweep(h, est, SWEEP_NS, snr, 50, seed=0, name=name)
        for name, est in estimators.items()
        for snr in (30.0, 70.0)
    }


class TestVariance:
    def test_unit_identity(self):
        c = Spectrum1D(np.ones(11))
        assert noise_variance(c, 0.0) == pytest.approx(1.0)

    def test_h_seventy(self, h50):
        ref = np.sum(np.abs(h50.coeffs) ** 2) / (101 * 1e7)
        assert noise_variance(h50, 70.0) == pytest.approx(ref, rel=1e-14)

    def test_infinite_snr(self, h50):
        assert noise_variance(h50, math.inf) == 0.0
        assert noise_variance(h50, 400.0) < 1e-40

    def test_zero_signal(self):
        with pytest.raises(ZeroSignal):
            noise_variance(Spectrum1D.zeros(4), 30.0)


class TestAddNoise:
    def test_negligible_noise(self, h50):
        out = add_noise(h50, NoiseSpec(300.0, 1))
        np.testing.assert_allclose(out.coeffs, h50.coeffs, rtol=1e-10, atol=1e-10 * np.max(np.abs(h50.coeffs)))
        assert out.noisy

    def test_deterministic(self, h50):
        a = add_noise(h50, NoiseSpec(30.0, 42)).coeffs
        b = add_noise(h50, NoiseSpec(30.0, 42)).coeffs
        assert a.tobytes() == b.tobytes()
        assert add_noise(h50, NoiseSpec(30.0, 43)).coeffs.tobytes() != a.tobytes()

    def test_empirical_snr(self):
        c = Spectrum1D(np.exp(1j * np.linspace(0, 5, 10_001)))
        assert empirical_snr_db(c, add_noise(c, NoiseSpec(30.0, 7))) == pytest.approx(30.0, abs=0.5)

    def test_variance_calibration(self):
        c = Spectrum1D(np.ones(200_001))
        sigma2 = noise_variance(c, 10.0)
        n = add_noise(c, NoiseSpec(10.0, 3)).coeffs - c.coeffs
        assert np.mean(np.abs(n) ** 2) == pytest.approx(sigma2, rel=0.02)
        # split evenly between real and imaginary parts
        assert np.var(n.real) == pytest.approx(sigma2 / 2, rel=0.02)
        assert np.var(n.imag) == pytest.approx(sigma2 / 2, rel=0.02)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            NoiseSpec(math.nan)
        with pytest.raises(ValueError):
            NoiseSpec(30.0, -1)
        with pytest.raises(ValueError):
            NoiseSpec(30.0, 2**64)


class TestSeeds:
    def test_splitmix64_reference(self):
        # first output of the reference SplitMix64 generator seeded with 0
        assert splitmix64(0) == 0xE220A8397B1DCDAF

    def test_derived_seeds_distinct(self):
        seeds = {derive_seed(0, t, N) for t in range(50) for N in SWEEP_NS}
        assert len(seeds) == 200
        assert all(0 <= s < 2**64 for s in seeds)

    def test_derive_seed_composition(self):
        s = splitmix64(splitmix64(splitmix64(5) ^ 3) ^ 64)
        assert derive_seed(5, 3, 64) == s


class TestSweep:
    def test_infinite_snr_is_noiseless(self, h, h_jumps, estimators):
        rows = noise_sweep(h, estimators["prony"], (50, 100), math.inf, 3)
        for r in rows:
            ref = match_jump_sets(h_jumps, estimators["prony"](fourier_coeffs_exact(h, r.N)))
            assert r.mean_eps == ref.eps_location
            assert r.skip_fraction == 0.0

    def test_threads_do_not_change_results(self, h, estimators):
        a = noise_sweep(h, estimators["concentration"], (32,), 40.0, 6, seed=9, threads=1)
        b = noise_sweep(h, estimators["concentration"], (32,), 40.0, 6, seed=9, threads=3)
        assert a == b

    def test_needs_trials(self, h, estimators):
        with pytest.raises(ValueError):
            noise_sweep(h, estimators["prony"], (32,), 30.0, 0)

    def test_seventy_db_slope(self, sweeps):
        rows = sweeps[("concentration", 70.0)]
        assert convergence_slope(SWEEP_NS, [r.mean_eps for r in rows]) <= -1.5

    def test_concentration_more_robust_at_thirty(self, sweeps):
        conc = sweeps[("concentration", 30.0)]
        pr = sweeps[("prony", 30.0)]
        for a, b in zip(conc, pr):
            if a.N >= 50:
                assert a.mean_eps < b.mean_eps

    @pytest.mark.parametrize("name", ["concentration", "prony"])
    def test_more_noise_more_error(self, sweeps, name):
        for lo, hi in zip(sweeps[(name, 30.0)], sweeps[(name, 70.0)]):
            assert lo.mean_eps >= hi.mean_eps

    def test_csv_schema(self, sweeps):
        text = sweep_to_csv(sweeps[("prony", 70.0)])
        lines = text.splitlines()
        assert lines[0] == ",".join(SWEEP_COLUMNS)
        assert lines[1].startswith("25,prony,70.0,")
        assert len(lines) == 1 + len(SWEEP_NS)
