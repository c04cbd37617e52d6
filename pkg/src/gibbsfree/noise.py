"""Complex Gaussian measurement noise on Fourier coefficients and sweeps over it."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CardinalityMismatch, GibbsFreeError, ZeroSignal
from .functions import Spectrum1D, fourier_coeffs_exact, jump_set_of
from .spectral import match_jump_sets

_MASK64 = (1 << 64) - 1


def splitmix64(x):
    """SplitMix64 finaliser; a bijective 64-bit mix."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(master, trial, N):
    """Sub-seed for one (trial, band) cell: ``mix(mix(mix(master) ^ trial) ^ N)``."""
    s = splitmix64(int(master) & _MASK64)
    s = splitmix64(s ^ (int(trial) & _MASK64))
    return splitmix64(s ^ (int(N) & _MASK64))


@dataclass(frozen=True)
class NoiseSpec:
    snr_db: float
    seed: int = 0

    def __post_init__(self):
        if math.isnan(self.snr_db):
            raise ValueError("snr_db must not be NaN")
        if not 0 <= int(self.seed) <= _MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def noise_variance(spec1d, snr_db):
    """``sigma^2 = ||c||^2 / ((2N+1) 10^(snr_db/10))``.

    Raises
    ------
    ZeroSignal
        If every coefficient is zero.
    """
    energy = float(np.sum(np.abs(spec1d.coeffs) ** 2))
    if energy == 0:
        raise ZeroSignal("cannot scale noise to an all-zero spectrum")
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    return energy / (spec1d.coeffs.size * 10.0 ** (snr_db / 10.0))


def add_noise(spec1d, noise):
    """Add ``CN(0, sigma^2)`` noise independently to every coefficient.

    Real and imaginary parts are each ``N(0, sigma^2/2)``. The result is
    flagged ``noisy`` and is generally not conjugate-symmetric.
    """
    var = noise_variance(spec1d, noise.snr_db)
    rng = np.random.default_rng(int(noise.seed))
    draws = rng.standard_normal((spec1d.coeffs.size, 2))
    n = (draws[:, 0] + 1j * draws[:, 1]) * math.sqrt(var / 2.0)
    return Spectrum1D(spec1d.coeffs + n, noisy=True)


def empirical_snr_db(clean, noisy):
    c = clean.coeffs
    n = noisy.coeffs - c
    return 10.0 * math.log10(np.sum(np.abs(c) ** 2) / np.sum(np.abs(n) ** 2))


@dataclass(frozen=True)
class SweepRow:
    N: int
    estimator: str
    snr_db: float
    mean_eps: float
    mean_delta: float
    skip_fraction: float


SWEEP_COLUMNS = ("N", "estimator", "snr_db", "mean_eps", "mean_delta", "skip_fraction")


def sweep_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow([r.N, r.estimator, repr(float(r.snr_db)), repr(float(r.mean_eps)), repr(float(r.mean_delta)), repr(float(r.skip_fraction))])
    return buf.getvalue()


def _one_trial(estimate, clean, truth, snr_db, seed, min_height):
    spec = clean if math.isinf(snr_db) else add_noise(clean, NoiseSpec(snr_db, seed))
    try:
        err = match_jump_sets(truth, estimate(spec), min_height=min_height)
    except (CardinalityMismatch, GibbsFreeError, np.linalg.LinAlgError):
        return None
    return err.eps_location, err.delta_height


def noise_sweep(function, estimator, Ns, snr_db, trials, seed=0, name=None, threads=1, min_height=0.0):
    """Mean location and height errors of an estimator under noise.

    Parameters
    ----------
    function : PiecewiseFnSpec
        Source of the exact coefficients and the true jump set.
    estimator : callable
        ``Spectrum1D -> JumpSet``; see :func:`gibbsfree.pipeline.make_estimator`.
    Ns : sequence of int
    snr_db : float
        ``inf`` disables noise.
    trials : int
        Noise realisations per band limit, each seeded by :func:`derive_seed`.
    min_height : float
        Estimates at or below this magnitude are ignored when pairing.

    Returns
    -------
    list of SweepRow
        Trials whose jump count does not match the truth (or whose estimator
        raised) are excluded from the means and counted in ``skip_fraction``.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    truth = jump_set_of(function)
    label = name or getattr(estimator, "name", "estimator")
    rows = []
    for N in Ns:
        clean = fourier_coeffs_exact(function, N)
        seeds = [derive_seed(seed, t, N) for t in range(trials)]
        if threads > 1:
            with ThreadPoolExecutor(threads) as pool:
                results = list(
                    pool.map(lambda s: _one_trial(estimator, clean, truth, snr_db, s, min_height), seeds)
                )
        else:
            results = [_one_trial(estimator, clean, truth, snr_db, s, min_height) for s in seeds]
        ok = [r for r in results if r is not None]
        if ok:
            eps = float(np.mean([r[0] for r in ok]))
            delta = float(np.mean([r[1] for r in ok]))
        else:
            eps = delta = math.inf
        rows.append(SweepRow(N, label, snr_db, eps, delta, 1.0 - len(ok) / trials))
    return rows
