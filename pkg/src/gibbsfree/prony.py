"""Prony-type jump estimation from Fourier coefficients.

With ``y[k] = 2 pi i k c_k`` the leading-order coefficient model becomes a sum
of unit-modulus exponentials, ``y[k] ~ sum_j a_j z_j^k`` with
``z_j = exp(-i x_j)``. Linear prediction on a Hankel system gives the ``z_j``
as polynomial roots, after which the heights ``a_j`` follow from a
Vandermonde least-squares solve.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.linalg import hankel

from .errors import IllConditioned, TooFewCoefficients, TooFewSamples
from .functions import TWO_PI, JumpSet, circular_distance, wrap

# pre-projection distance from the unit circle beyond which a root is discarded
ROOT_RADIUS_TOL = 0.2
# roots closer than this (radians) are merged into one jump
MERGE_TOL = 1e-6
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class PronyConfig:
    """Settings for :func:`prony_estimate`.

    Parameters
    ----------
    order : int or "auto"
        Number of exponentials (jumps). ``"auto"`` uses the SVD-gap rule of
        :func:`estimate_model_order`.
    k_min : int, optional
        Smallest coefficient index used; defaults to ``N // 2``.
    svd_gap_threshold : float
        Singular values below ``s_max / svd_gap_threshold`` count as noise.
    unit_circle_projection : bool
        Normalise roots onto the unit circle before solving for heights.
    """

    order: Union[int, str] = "auto"
    k_min: int | None = None
    svd_gap_threshold: float = 1e3
    unit_circle_projection: bool = True

    def __post_init__(self):
        if self.order != "auto" and (not isinstance(self.order, (int, np.integer)) or self.order < 0):
            raise ValueError("order must be a non-negative integer or 'auto'")
        if self.svd_gap_threshold <= 1:
            raise ValueError("svd_gap_threshold must exceed 1")

    def resolve_k_min(self, N):
        k_min = max(1, N // 2) if self.k_min is None else int(self.k_min)
        if not 1 <= k_min <= N:
            raise TooFewCoefficients(f"k_min={k_min} outside 1..{N}")
        return k_min


def prony_observations(spec1d):
    """``y[k] = 2 pi i k c_k`` for ``k = 1..N`` (entry ``k - 1``)."""
    k = np.arange(1, spec1d.N + 1)
    return TWO_PI * 1j * k * spec1d.positive()


def _band(y, k_min):
    return np.asarray(y, dtype=complex)[k_min - 1 :]


def estimate_model_order(y, cfg=PronyConfig()):
    """Number of singular values of the band Hankel matrix above the gap threshold.

    The Hankel matrix has ``L - J_max`` rows and ``J_max + 1`` columns, where
    ``L`` is the number of samples in ``[k_min, N]`` and ``J_max = L // 3``.
    """
    y = np.asarray(y, dtype=complex)
    band = _band(y, cfg.resolve_k_min(y.size))
    L = band.size
    j_max = L // 3
    if j_max < 1:
        raise TooFewSamples(f"{L} samples cannot support a model order estimate")
    H = hankel(band[: L - j_max], band[L - j_max - 1 :])
    s = np.linalg.svd(H, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(min(j_max, np.count_nonzero(s > s[0] / cfg.svd_gap_threshold)))


def _merge_close(x):
    """Group circularly close locations; returns the groups as index lists."""
    order = np.argsort(x)
    groups = [[order[0]]]
    for i in order[1:]:
        if circular_distance(x[i], x[groups[-1][-1]]) < MERGE_TOL:
            groups[-1].append(i)
        else:
            groups.append([i])
    if len(groups) > 1 and circular_distance(x[groups[0][0]], x[groups[-1][-1]]) < MERGE_TOL:
        groups[0] = groups.pop() + groups[0]
    return groups


def prony_estimate(spec1d, cfg=PronyConfig()):
    """Estimate jump locations and heights from a spectrum.

    Steps: least-squares linear prediction on the Hankel system over
    ``k in [k_min, N]``; roots of the prediction polynomial; optional
    projection onto the unit circle (discarding roots further than 0.2 from
    it); ``x_j = -arg z_j``; real parts of the Vandermonde least-squares
    amplitudes as heights.

    Raises
    ------
    TooFewCoefficients
        If the band cannot hold the Hankel system for the model order.
    IllConditioned
        If the Vandermonde matrix condition number exceeds 1e12.
    """
    N = spec1d.N
    y = prony_observations(spec1d)
    k_min = cfg.resolve_k_min(N)
    J = estimate_model_order(y, cfg) if cfg.order == "auto" else int(cfg.order)
    if J == 0:
        return JumpSet()
    if N < 2 * J + 1 or k_min > N - 2 * J:
        raise TooFewCoefficients(f"N={N}, k_min={k_min} too small for {J} jumps")
    band = _band(y, k_min)
    L = band.size

    # y[n+J] = -sum_m p_m y[n+m]
    A = hankel(band[: L - J], band[L - J - 1 : L - 1])
    rhs = -band[J:]
    p, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    roots = np.roots(np.concatenate([[1.0], p[::-1]]))

    radius = np.abs(roots)
    if cfg.unit_circle_projection:
        roots = roots[np.abs(radius - 1.0) <= ROOT_RADIUS_TOL]
        roots = roots / np.abs(roots)
    if roots.size == 0:
        return JumpSet()

    x = wrap(-np.angle(roots))
    groups = _merge_close(x)
    if len(groups) < x.size:
        # merged roots share one exponential, so one amplitude carries the summed height
        x = np.array([x[g[0]] for g in groups])
        roots = np.exp(-1j * x) if cfg.unit_circle_projection else np.array([roots[g[0]] for g in groups])

    ks = np.arange(k_min, N + 1)
    V = roots[None, :] ** ks[:, None]
    cond = np.linalg.cond(V)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise IllConditioned(f"Vandermonde condition number {cond:.3g}")
    C, *_ = np.linalg.lstsq(V, band, rcond=None)

    imag_bad = np.abs(C.imag) > 0.05 * np.abs(C)
    if np.any(imag_bad):
        warnings.warn(
            f"{int(imag_bad.sum())} Prony amplitude(s) have imaginary parts above 5% of their modulus"
        )
    heights = C.real
    big = np.abs(heights) >= 1e-8 * np.max(np.abs(heights)) if heights.size else heights
    return JumpSet(x[big], heights[big])
