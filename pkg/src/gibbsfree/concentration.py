"""Concentration-kernel edge detection.

The conjugate sum ``K(x) = sum_{|k|<=N} c_k i sgn(k) sigma(|k|/N) exp(ikx)``
converges to the jump function ``f(x+) - f(x-)``. Peaks of ``|K|`` give
grid-accurate jump candidates, which are then refined to sub-grid accuracy
by fitting the asymptotic coefficient model

    2 pi i k c_k  ~  sum_j a_j exp(-ikx_j)  [+ sum_j b_j exp(-ikx_j) / (ik)]

by variable projection: heights (and optional slope jumps ``b_j``) are
solved linearly for fixed locations, and locations take damped
Gauss-Newton steps.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .errors import BandMismatch, DivergedRefinement
from .functions import PI, TWO_PI, JumpSet, circular_distance, wrap
from .spectral import SampledFunction, _real_part, fourier_sum, uniform_grid

FAMILIES = ("trigonometric", "polynomial", "exponential")
_ALIASES = {"trig": "trigonometric", "poly": "polynomial", "exp": "exponential"}

# below this max|K| a cross-section is treated as smooth
ABS_FLOOR = 1e-12
# refined heights below this fraction of the largest candidate height are dropped
NEGLIGIBLE_HEIGHT = 1e-8


@dataclass(frozen=True)
class ConcentrationFactor:
    """One of the trigonometric, polynomial or exponential factor families.

    Parameters
    ----------
    family : str
        ``"trigonometric"``, ``"polynomial"`` or ``"exponential"`` (short
        aliases ``trig``/``poly``/``exp`` are accepted).
    N : int
        Band limit; the exponential normalisation depends on it.
    alpha : float
        Shape parameter of the trigonometric and exponential families.
    p : int
        Order of the polynomial family.
    """

    family: str = "trigonometric"
    N: int = 64
    alpha: float = math.pi
    p: int = 1

    def __post_init__(self):
        family = _ALIASES.get(self.family, self.family)
        if family not in FAMILIES:
            raise ValueError(f"unknown concentration factor {self.family!r}")
        object.__setattr__(self, "family", family)
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.p < 1:
            raise ValueError("polynomial order must be at least 1")
        if family == "exponential" and self.N < 3:
            raise ValueError("exponential factor needs N >= 3")

    @classmethod
    def default(cls, family, N):
        family = _ALIASES.get(family, family)
        alpha = 6.0 if family == "exponential" else math.pi
        return cls(family, N, alpha)

    def with_band(self, N):
        return replace(self, N=N)

    def __call__(self, eta):
        return factor_eval(self, eta)


def sine_integral(alpha):
    return float(special.sici(alpha)[0])


@lru_cache(maxsize=256)
def exponential_normaliser(alpha, N):
    """``pi / int_{1/N}^{1-1/N} exp(1/(alpha t (t-1))) dt``."""
    val, _ = integrate.quad(
        lambda t: math.exp(1.0 / (alpha * t * (t - 1.0))), 1.0 / N, 1.0 - 1.0 / N,
        epsabs=0.0, epsrel=1e-13, limit=200,
    )
    return math.pi / val


def factor_eval(factor, eta):
    """Evaluate a concentration factor at ``eta = |k|/N`` in (0, 1]."""
    eta = np.asarray(eta, dtype=float)
    if factor.family == "trigonometric":
        return math.pi * np.sin(factor.alpha * eta) / sine_integral(factor.alpha)
    if factor.family == "polynomial":
        return factor.p * math.pi * eta**factor.p
    C = exponential_normaliser(float(factor.alpha), int(factor.N))
    inner = (eta > 0) & (eta < 1)
    safe = np.where(inner, eta, 0.5)
    val = C * safe * np.exp(1.0 / (factor.alpha * safe * (safe - 1.0)))
    return np.where(inner, val, 0.0)


def conjugate_coeffs(spec1d, factor):
    """Coefficients ``c_k i sgn(k) sigma(|k|/N)`` of the concentration sum."""
    if factor.N != spec1d.N:
        raise BandMismatch(f"factor band {factor.N} != spectrum band {spec1d.N}")
    k = spec1d.k
    sig = np.zeros(k.size)
    nz = k != 0
    sig[nz] = factor_eval(factor, np.abs(k[nz]) / spec1d.N)
    return spec1d.coeffs * 1j * np.sign(k) * sig


def concentration_sum(spec1d, factor, grid):
    """Jump-function approximation ``K_N^sigma[f]`` on ``grid``.

    Raises
    ------
    BandMismatch
        If the factor was built for another band limit.
    NonRealResult
        For a noiseless spectrum whose sum is not real to 1e-9.
    """
    c = conjugate_coeffs(spec1d, factor)
    z = fourier_sum(c, spec1d.k, grid)
    vals = _real_part(z, spec1d.noisy, "concentration sum")
    return SampledFunction(grid, vals)


def concentration_sum_fft(spec1d, factor, n):
    """Same sum on ``uniform_grid(n)`` via one inverse FFT (needs ``n > 2N``)."""
    N = spec1d.N
    if n <= 2 * N:
        raise ValueError("FFT grid must exceed 2N points")
    c = conjugate_coeffs(spec1d, factor)
    buf = np.zeros(n, dtype=complex)
    buf[spec1d.k % n] = c
    # grid starts at -pi: exp(ik(-pi + 2 pi m/n)) = (-1)^k exp(2 pi i k m/n)
    buf[spec1d.k % n] *= np.where(spec1d.k % 2 == 0, 1.0, -1.0)
    z = np.fft.ifft(buf) * n
    vals = _real_part(z, spec1d.noisy, "concentration sum")
    return SampledFunction(uniform_grid(n), vals)


@dataclass(frozen=True)
class DetectionConfig:
    """Peak-finding and refinement settings.

    ``None`` entries are derived from the band limit ``N`` by :meth:`resolve`:
    ``min_separation = pi log(N) / N`` and ``refine_k_min = ceil(N/4)``.

    ``refine_model`` selects the coefficient model the refinement fits:
    ``"jump"`` uses only jump heights; ``"jump+slope"`` adds the next
    asymptotic term ``b_j exp(-ikx_j)/(ik)`` carrying the jumps ``b_j`` of
    the first derivative, removing the leading model bias of the locations.
    """

    grid_size: int = 4096
    threshold_rel: float = 0.4
    min_separation: float | None = None
    refine: bool = True
    refine_k_min: int | None = None
    max_refine_iters: int = 50
    refine_model: str = "jump"

    def __post_init__(self):
        if not 0 < self.threshold_rel < 1:
            raise ValueError("threshold_rel must lie in (0, 1)")
        if self.refine_model not in ("jump", "jump+slope"):
            raise ValueError(f"unknown refine_model {self.refine_model!r}")

    def resolve(self, N):
        if self.grid_size < 8 * N:
            raise ValueError(f"grid_size {self.grid_size} below 8N = {8 * N}")
        sep = self.min_separation
        if sep is None:
            sep = PI * math.log(N) / N
        kmin = self.refine_k_min
        if kmin is None:
            kmin = math.ceil(N / 4)
        return replace(self, min_separation=float(sep), refine_k_min=int(max(1, kmin)))


def detect_peaks(K, cfg=DetectionConfig(), N=None):
    """Threshold and cluster the extrema of ``|K|`` on a periodic uniform grid.

    Local maxima of ``|K|`` above ``threshold_rel * max|K|`` are kept in order
    of decreasing magnitude unless they fall within ``min_separation`` of an
    already kept one. Each candidate's height is ``K`` at its grid point.
    """
    if cfg.min_separation is None:
        if N is None:
            raise ValueError("min_separation unresolved; pass N or a resolved config")
        cfg = replace(cfg, min_separation=PI * math.log(N) / N)
    x = K.grid
    v = K.values
    mag = np.abs(v)
    peak = float(mag.max()) if mag.size else 0.0
    if peak < ABS_FLOOR:
        return JumpSet()
    left = np.roll(mag, 1)
    right = np.roll(mag, -1)
    is_max = (mag >= left) & (mag > right) & (mag >= cfg.threshold_rel * peak)
    idx = np.flatnonzero(is_max)
    idx = idx[np.argsort(-mag[idx], kind="stable")]
    kept = []
    for i in idx:
        if all(circular_distance(x[i], x[j]) >= cfg.min_separation for j in kept):
            kept.append(i)
    kept = np.array(sorted(kept, key=lambda i: x[i]), dtype=int)
    return JumpSet(wrap(x[kept]), v[kept])


# ---------------------------------------------------------------------------
# refinement
# ---------------------------------------------------------------------------


def _design(x, ks, model):
    E = np.exp(-1j * np.outer(ks, x))
    if model == "jump":
        return E
    return np.hstack([E, E / (1j * ks[:, None])])


def _solve_linear(x, ks, y, model):
    """Real least-squares amplitudes for fixed locations; returns (theta, residual)."""
    A = _design(x, ks, model)
    Ar = np.vstack([A.real, A.imag])
    yr = np.concatenate([y.real, y.imag])
    theta, *_ = np.linalg.lstsq(Ar, yr, rcond=None)
    return theta, y - A @ theta


def _jacobian(x, ks, theta, model):
    J = x.size
    a = theta[:J]
    E = np.exp(-1j * np.outer(ks, x))
    # d/dx_j of a_j e^{-ikx_j} is -ik a_j e^{-ikx_j}; the residual has the opposite sign
    jac = 1j * ks[:, None] * E * a[None, :]
    if model == "jump+slope":
        b = theta[J:]
        jac = jac + E * b[None, :]
    return np.vstack([jac.real, jac.imag])


def refine_objective(spec1d, jumps, k_min, model="jump"):
    """Sum of squared residuals of the coefficient model at the given locations."""
    ks = np.arange(k_min, spec1d.N + 1)
    y = TWO_PI * 1j * ks * spec1d.coeffs[spec1d.N + ks]
    _, r = _solve_linear(np.asarray(jumps.locations), ks, y, model)
    return float(np.vdot(r, r).real)


def refine_jumps(spec1d, candidates, cfg=DetectionConfig()):
    """Refine candidate jumps by variable projection with damped Gauss-Newton.

    Minimises ``sum_{k=k_min}^{N} |2 pi i k c_k - model_k|^2`` over the
    locations, with real heights solved exactly at every iterate. The damping
    starts at 1e-3, halves on an accepted step and doubles on a rejected one.

    Returns
    -------
    JumpSet
        The refined jumps; those whose height falls below 1e-8 of the largest
        candidate height are dropped as round-off. If five consecutive damped attempts fail to lower
        the objective, the candidates are returned unchanged and a
        :class:`DivergedRefinement` warning is issued.
    """
    if len(candidates) == 0:
        return candidates
    cfg = cfg.resolve(spec1d.N) if cfg.refine_k_min is None or cfg.min_separation is None else cfg
    N = spec1d.N
    ks = np.arange(cfg.refine_k_min, N + 1)
    model = cfg.refine_model
    J = len(candidates)
    n_lin = J if model == "jump" else 2 * J
    if 2 * ks.size < n_lin + J:
        return candidates
    y = TWO_PI * 1j * ks * spec1d.coeffs[N + ks]

    x = np.array(candidates.locations, dtype=float)
    theta, r = _solve_linear(x, ks, y, model)
    obj = float(np.vdot(r, r).real)
    obj0 = obj
    lam = 1e-3
    failures = 0
    rr = np.concatenate([r.real, r.imag])
    for _ in range(cfg.max_refine_iters):
        jac = _jacobian(x, ks, theta, model)
        g = jac.T @ rr
        H = jac.T @ jac
        d = np.diag(H).copy()
        d[d == 0] = 1.0
        accepted = False
        while failures < 5:
            try:
                step = -np.linalg.solve(H + lam * np.diag(d), g)
            except np.linalg.LinAlgError:
                lam *= 2.0
                failures += 1
                continue
            x_new = x + step
            theta_new, r_new = _solve_linear(x_new, ks, y, model)
            obj_new = float(np.vdot(r_new, r_new).real)
            if obj_new <= obj:
                x, theta, r, obj = x_new, theta_new, r_new, obj_new
                rr = np.concatenate([r.real, r.imag])
                lam *= 0.5
                failures = 0
                accepted = True
                break
            lam *= 2.0
            failures += 1
        if not accepted:
            # stalled after progress is a converged fit; stalled at the start is divergence
            if obj < obj0 or obj <= 1e-28 * max(1.0, float(np.vdot(y, y).real)):
                break
            warnings.warn("refinement objective did not decrease; keeping candidates", DivergedRefinement)
            return candidates
        if np.max(np.abs(step)) < 1e-12:
            break

    heights = theta[:J]
    x = wrap(x)
    # candidates on a smooth function refine to round-off heights
    keep = np.abs(heights) > NEGLIGIBLE_HEIGHT * np.max(np.abs(candidates.heights))
    try:
        return JumpSet(x[keep], heights[keep])
    except ValueError:
        # two locations collapsed onto one another
        return candidates


def detect(spec1d, factor=None, cfg=DetectionConfig()):
    """Concentration sum, peak finding and (optionally) refinement."""
    N = spec1d.N
    factor = ConcentrationFactor.default("trigonometric", N) if factor is None else factor.with_band(N)
    cfg = cfg.resolve(N)
    K = concentration_sum_fft(spec1d, factor, cfg.grid_size)
    cand = detect_peaks(K, cfg)
    if cfg.refine and len(cand):
        return refine_jumps(spec1d, cand, cfg)
    return cand
