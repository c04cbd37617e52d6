"""Fourier partial sums, ramp functions and the edge-augmented reconstruction.

Norms follow the convention ``||g||_2 = sqrt((1/2pi) int |g|^2)`` so that
Parseval reads ``||g||_2^2 = sum_k |g_k|^2``.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import CardinalityMismatch, DegenerateFit, NonRealResult
from .functions import (
    PI,
    TWO_PI,
    JumpSet,
    Spectrum1D,
    circular_distance,
    fourier_coeffs_exact,
    ramp_spectrum,
    wrap,
)

# distance (radians) from any jump below which sup-norm checks are not taken
AWAY_FROM_JUMPS = 0.05

IMAG_TOL = 1e-9

# cap on the complex exponential block held in memory at once
_CHUNK = 1 << 21


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Values of a reconstruction on a strictly increasing grid in (-pi, pi]."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        x = np.array(self.grid, dtype=float).reshape(-1)
        v = np.array(self.values, dtype=float).reshape(-1)
        if x.shape != v.shape:
            raise ValueError("grid and values differ in length")
        if x.size > 1 and np.any(np.diff(x) <= 0):
            raise ValueError("grid must be strictly increasing")
        x.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "grid", x)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.grid.size

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "value"])
        for x, v in zip(self.grid.tolist(), self.values.tolist()):
            w.writerow([repr(x), repr(v)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = list(csv.DictReader(io.StringIO(text)))
        return cls([float(r["x"]) for r in rows], [float(r["value"]) for r in rows])


def uniform_grid(n):
    """``n`` equispaced points on [-pi, pi), endpoint excluded."""
    return -PI + TWO_PI * np.arange(n) / n


def fourier_sum(coeffs, k, x):
    """Complex ``sum_k c_k exp(ikx)`` evaluated in memory-bounded chunks."""
    x = np.asarray(x, dtype=float).reshape(-1)
    out = np.empty(x.size, dtype=complex)
    step = max(1, _CHUNK // max(1, len(k)))
    for start in range(0, x.size, step):
        xs = x[start : start + step]
        out[start : start + step] = np.exp(1j * np.outer(xs, k)) @ coeffs
    return out


def _real_part(z, noisy, what="reconstruction"):
    resid = np.abs(z.imag)
    bound = IMAG_TOL * (1.0 + np.abs(z.real))
    if np.any(resid >= bound):
        worst = float(np.max(resid))
        if noisy:
            warnings.warn(f"{what} has imaginary residual {worst:.3g} (noisy spectrum)")
        else:
            raise NonRealResult(f"{what} has imaginary residual {worst:.3g}")
    return z.real


def _as_sampled(grid, values):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim == 1 and (grid.size < 2 or np.all(np.diff(grid) > 0)):
        return SampledFunction(grid, values)
    return values


def values_of(result):
    """Plain value array of a reconstruction result."""
    return result.values if isinstance(result, SampledFunction) else np.asarray(result)


def partial_sum(spec1d, grid):
    """Fourier partial sum ``S_N f(x) = sum_{|k|<=N} c_k exp(ikx)``.

    Returns a :class:`SampledFunction` for a sorted 1-D grid and a bare array
    otherwise.

    Raises
    ------
    NonRealResult
        When the imaginary part exceeds ``1e-9 (1 + |value|)`` for a
        noiseless spectrum (a corrupted or asymmetric spectrum).
    """
    z = fourier_sum(spec1d.coeffs, spec1d.k, grid)
    vals = _real_part(z, spec1d.noisy, "partial sum")
    return _as_sampled(grid, vals.reshape(np.shape(grid)))


def ramp_eval(x_j, x):
    """Periodic unit ramp with its jump at ``x_j``.

    ``(-pi - x)/2pi`` left of the jump, ``(pi - x)/2pi`` right of it and the
    two-sided average ``-x_j/2pi`` at the jump itself.
    """
    x = wrap(x)
    x_j = float(wrap(x_j))
    out = np.where(x < x_j, (-PI - x) / TWO_PI, (PI - x) / TWO_PI)
    out = np.where(x == x_j, -x_j / TWO_PI, out)
    return float(out) if out.ndim == 0 else out


def ramp_sum_eval(jumps, x):
    """``sum_j a_j r_j(x)``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape)
    for x_j, a_j in jumps:
        out = out + a_j * ramp_eval(x_j, x)
    return out


def est_coeffs(jumps, N):
    """Jump-model coefficients ``sum_j a_j exp(-ikx_j) / (2 pi i k)``; zero at ``k = 0``."""
    return ramp_spectrum(jumps, N, include_mean=False)


def edge_augmented_sum(spec1d, jumps, grid):
    """Edge-augmented partial sum.

    ``sum_{|k|<=N} (c_k - c_k^est) exp(ikx) + sum_j a_j r_j(x)``, where the
    jump set may be the true one or an estimate. The ``k = 0`` term subtracts
    the ramp sum's own mean ``-sum_j a_j x_j / 2pi`` so the result equals
    ``S_N f`` plus the jump-model tail ``sum_{|k|>N} c_k^est exp(ikx)``.
    """
    if len(jumps) == 0:
        return partial_sum(spec1d, grid)
    resid = spec1d - ramp_spectrum(jumps, spec1d.N)
    z = fourier_sum(resid.coeffs, resid.k, grid)
    vals = _real_part(z, spec1d.noisy, "edge-augmented sum")
    vals = vals.reshape(np.shape(grid)) + ramp_sum_eval(jumps, grid)
    return _as_sampled(grid, vals)


def tail_form_check(spec1d, jumps, grid, K_tail):
    """Max discrepancy between the truncated-tail and closed forms of the edge sum.

    The tail ``sum_{N<|k|<=K_tail} c_k^est exp(ikx)`` is added to the plain
    partial sum and compared with :func:`edge_augmented_sum`.
    """
    N = spec1d.N
    if K_tail < N:
        raise ValueError("K_tail must be at least N")
    if len(jumps) == 0:
        return 0.0
    grid = np.asarray(grid, dtype=float).reshape(-1)
    total = fourier_sum(spec1d.coeffs, spec1d.k, grid).real
    # k and -k terms pair into 2 Re(.)
    ks = np.arange(N + 1, K_tail + 1)
    step = max(1, _CHUNK // max(1, grid.size))
    for start in range(0, ks.size, step):
        kb = ks[start : start + step]
        ck = (np.exp(-1j * np.outer(kb, jumps.locations)) @ jumps.heights) / (TWO_PI * 1j * kb)
        total += 2.0 * (np.exp(1j * np.outer(grid, kb)) @ ck).real
    closed = values_of(edge_augmented_sum(spec1d, jumps, grid))
    return float(np.max(np.abs(total - closed)))


# ---------------------------------------------------------------------------
# error metrics
# ---------------------------------------------------------------------------


def panel_nodes(breakpoints=(), max_panel=0.05, nodes=24):
    """Gauss-Legendre nodes and weights on (-pi, pi] with panels split at ``breakpoints``.

    Weights include the ``1/2pi`` normalisation, so ``sum(w * g)`` is the mean of ``g``.
    """
    cuts = np.unique(np.concatenate([[-PI, PI], wrap(np.asarray(breakpoints, dtype=float))]))
    cuts = cuts[(cuts >= -PI) & (cuts <= PI)]
    t, w = np.polynomial.legendre.leggauss(nodes)
    xs, ws = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        m = max(1, int(np.ceil((b - a) / max_panel)))
        edges = np.linspace(a, b, m + 1)
        half = 0.5 * np.diff(edges)
        xs.append((edges[:-1, None] + half[:, None] * (t + 1)).ravel())
        ws.append((half[:, None] * w).ravel())
    return np.concatenate(xs), np.concatenate(ws) / TWO_PI


def l2_error(spec, recon, quad_nodes=24, breakpoints=(), max_panel=0.05):
    """``sqrt((1/2pi) int |f - recon|^2)`` by panelled Gauss-Legendre.

    Parameters
    ----------
    spec : PiecewiseFnSpec
        The reference function; its breakpoints are panel boundaries.
    recon : callable
        Vectorised reconstruction ``x -> values``.
    quad_nodes : int
        Gauss-Legendre nodes per panel.
    breakpoints : array_like
        Extra discontinuities of ``recon`` (e.g. estimated jump locations).
    max_panel : float
        Panel length cap; shrink it for band limits beyond ~1000.
    """
    cuts = np.concatenate([spec.breakpoints, np.asarray(breakpoints, dtype=float).reshape(-1)])
    x, w = panel_nodes(cuts, max_panel=max_panel, nodes=quad_nodes)
    diff = spec(x) - values_of(recon(x))
    return float(np.sqrt(np.sum(w * np.abs(diff) ** 2)))


def parseval_tail(spec, N, K=100_000):
    """``sqrt(sum_{N<|k|<=K} |c_k|^2)`` from the closed-form coefficients."""
    c = fourier_coeffs_exact(spec, K)
    mask = np.abs(c.k) > N
    return float(np.sqrt(np.sum(np.abs(c.coeffs[mask]) ** 2)))


def standard_error(spec, N, **kw):
    """``||f - S_N f||_2`` using exact coefficients."""
    c = fourier_coeffs_exact(spec, N)
    return l2_error(spec, lambda x: partial_sum(c, x), **kw)


def edge_error(spec, N, jumps, spectrum=None, **kw):
    """``||f - S_N^edge f||_2`` for a given (true or estimated) jump set."""
    c = fourier_coeffs_exact(spec, N) if spectrum is None else spectrum
    return l2_error(
        spec, lambda x: edge_augmented_sum(c, jumps, x), breakpoints=jumps.locations, **kw
    )


def coefficient_bound_error(c, N, p):
    """Upper bound ``sqrt(2 c^2 / ((2p - 1) N^(2p-1)))`` for ``|f_k| <= c/|k|^p``."""
    if p <= 0.5:
        raise ValueError("decay exponent must exceed 1/2")
    return float(np.sqrt(2.0 * c**2 / ((2.0 * p - 1.0) * N ** (2.0 * p - 1.0))))


def decay_constant(spectrum, p, k_min=1):
    """Smallest ``c`` with ``|c_k| <= c / |k|^p`` over the available band."""
    k = spectrum.k
    sel = np.abs(k) >= k_min
    return float(np.max(np.abs(spectrum.coeffs[sel]) * np.abs(k[sel]) ** p))


def estimated_jump_budget(c_tilde, N, jumps, eps, delta):
    """Bound on ``||f - f_tilde||_2`` for jump estimates within ``(eps, delta)``.

    ``sqrt(2 c~^2 / (3 N^3)) + J delta + sqrt(eps/2pi) (J delta + sum_j |a_j|)``.
    """
    J = len(jumps)
    total = float(np.sum(np.abs(jumps.heights)))
    return float(
        np.sqrt(2.0 * c_tilde**2 / (3.0 * N**3))
        + J * delta
        + np.sqrt(eps / TWO_PI) * (J * delta + total)
    )


def convergence_slope(Ns, errors):
    """Least-squares slope of ``log(error)`` against ``log(N)``."""
    Ns = np.asarray(Ns, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if Ns.size < 4 or Ns.shape != errors.shape:
        raise DegenerateFit("need at least four (N, error) pairs")
    if np.any(np.diff(Ns) <= 0):
        raise DegenerateFit("band limits must be strictly increasing")
    if np.any(~(errors > 0)) or not np.all(np.isfinite(errors)):
        raise DegenerateFit("errors must be positive and finite")
    slope, _ = np.polyfit(np.log(Ns), np.log(errors), 1)
    return float(slope)


@dataclass(frozen=True)
class JumpEstimateError:
    eps_location: float
    delta_height: float


def match_jump_sets(truth, estimate, min_height=0.0):
    """Pair estimated with true jumps greedily by circular distance.

    Parameters
    ----------
    truth, estimate : JumpSet
    min_height : float
        Estimates with ``|height|`` at or below this are discarded first.

    Returns
    -------
    JumpEstimateError
        Maximum location error and maximum height error over the pairs.

    Raises
    ------
    CardinalityMismatch
        If the filtered estimate and the truth differ in size.
    """
    keep = np.abs(estimate.heights) > min_height
    est_loc = estimate.locations[keep]
    est_hgt = estimate.heights[keep]
    if est_loc.size != len(truth):
        raise CardinalityMismatch(len(truth), int(est_loc.size))
    if est_loc.size == 0:
        return JumpEstimateError(0.0, 0.0)
    d = circular_distance(truth.locations[:, None], est_loc[None, :])
    order = np.argsort(d, axis=None, kind="stable")
    used_t, used_e = set(), set()
    eps = delta = 0.0
    for flat in order:
        i, j = divmod(int(flat), est_loc.size)
        if i in used_t or j in used_e:
            continue
        used_t.add(i)
        used_e.add(j)
        eps = max(eps, float(d[i, j]))
        delta = max(delta, abs(float(est_hgt[j] - truth.heights[i])))
        if len(used_t) == est_loc.size:
            break
    return JumpEstimateError(eps, delta)


def distance_to_jumps(x, jumps):
    """Circular distance from each point of ``x`` to the nearest jump (inf if none)."""
    x = np.asarray(x, dtype=float)
    if len(jumps) == 0:
        return np.full(x.shape, np.inf)
    return np.min(circular_distance(x[..., None], jumps.locations), axis=-1)


def away_grid(jumps, n=2048, margin=AWAY_FROM_JUMPS):
    """Uniform grid with every point closer than ``margin`` to a jump removed."""
    x = uniform_grid(n)
    return x[distance_to_jumps(x, jumps) >= margin]
