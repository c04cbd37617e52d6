"""Reference computations that share no code with the package.

Coefficients come from mpmath adaptive quadrature of hand-written formulas,
sums from explicit loops, and jump heights from one-sided limits written out
by hand.
"""

import math

import mpmath as mp
import numpy as np

PI = math.pi


def h_pieces():
    """h as (a, b, callable) triples, zero on the gaps."""
    return [
        (-3 * PI / 4, -PI / 2, lambda x: 1.5),
        (-PI / 4, PI / 8, lambda x: 7 / 4 - x / 2 + mp.sin(x - 0.25)),
        (3 * PI / 8, 3 * PI / 4, lambda x: 11 / 4 * x - 5),
    ]


def h_value(x):
    for a, b, f in h_pieces():
        if a < x <= b:
            return float(f(x))
    return 0.0


def h_jumps():
    """Locations and heights of h's six jumps from one-sided limits."""
    mid = lambda x: 7 / 4 - x / 2 + math.sin(x - 0.25)
    ramp = lambda x: 11 / 4 * x - 5
    locs = [-3 * PI / 4, -PI / 2, -PI / 4, PI / 8, 3 * PI / 8, 3 * PI / 4]
    heights = [1.5, -1.5, mid(-PI / 4), -mid(PI / 8), ramp(3 * PI / 8), -ramp(3 * PI / 4)]
    return np.array(locs), np.array(heights)


def s_pieces():
    return [
        (-PI, -PI / 2, lambda x: x**2),
        (-PI / 2, PI / 2, lambda x: mp.e**3 * mp.exp(x)),
        (PI / 2, PI, lambda x: mp.e**4 * x),
    ]


def coeff_mp(pieces, k, dps=30):
    """``(1/2pi) int f(x) exp(-ikx) dx`` by mpmath quadrature per piece."""
    with mp.workdps(dps):
        total = mp.mpf(0)
        for a, b, f in pieces:
            total += mp.quad(lambda x: f(x) * mp.exp(-1j * k * x), [a, b])
        return complex(total / (2 * mp.pi))


def direct_sum(coeffs, ks, x):
    """``sum_k c_k exp(ikx)`` by an explicit loop over k."""
    out = np.zeros(np.shape(x), dtype=complex)
    for c, k in zip(coeffs, ks):
        out += c * np.exp(1j * k * np.asarray(x))
    return out


def ramp(xj, x):
    """Unit sawtooth with its jump at xj, written from its definition."""
    x = (np.asarray(x, dtype=float) + PI) % (2 * PI) - PI
    return np.where(x < xj, (-PI - x) / (2 * PI), (PI - x) / (2 * PI))


def ramp_coeff(locs, heights, k):
    """Coefficients of a ramp sum, including the mean at k = 0."""
    if k == 0:
        return complex(-np.sum(np.asarray(heights) * np.asarray(locs)) / (2 * PI))
    return complex(np.sum(np.asarray(heights) * np.exp(-1j * k * np.asarray(locs))) / (2j * PI * k))


def dft_coeffs(samples, N):
    """Rectangle-rule coefficients by explicit loops."""
    M = len(samples)
    out = []
    for l in range(-N, N + 1):
        acc = 0j
        for m, v in enumerate(samples):
            y = -PI + 2 * PI * m / M
            acc += v * complex(math.cos(l * y), -math.sin(l * y))
        out.append(acc / M)
    return np.array(out)
