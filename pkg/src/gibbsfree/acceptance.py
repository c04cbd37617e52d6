"""The ten acceptance checks as one machine-readable report.

Each check measures, compares against a tolerance and times itself; a check
passes only if both the measurement and the runtime are within bounds.
Tolerances can be overridden per check through ``cfg.tolerances``.
"""

from __future__ import annotations

import copy
import json
import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .functions import (
    CORPUS,
    JumpSet,
    circular_distance,
    fourier_coeffs_2d_exact,
    fourier_coeffs_2d_quadrature,
    fourier_coeffs_exact,
    fourier_coeffs_quadrature,
    function_f1,
    function_f2,
    function_h,
    jump_set_of,
    ramp_spectrum,
)
from .noise import noise_sweep
from .prony import PronyConfig, prony_estimate
from .recon2d import Grid2D, edge_augmented_2d, partial_sum_2d, psnr
from .spectral import (
    away_grid,
    convergence_slope,
    decay_constant,
    edge_augmented_sum,
    edge_error,
    estimated_jump_budget,
    match_jump_sets,
    ramp_sum_eval,
    standard_error,
    values_of,
)

SCHEMA = "gibbsfree.acceptance/1"
POW2 = (16, 32, 64, 128, 256, 512)

TOLERANCES = {
    "1": {"slope_range": [-0.6, -0.4], "runtime_s": 30},
    "2": {"slope_range": [-1.65, -1.35], "runtime_s": 30},
    "3": {"max_slope": -1.3, "runtime_s": 180},
    "4": {"max_slope": -1.6, "runtime_s": 120},
    "5": {"max_slope_70db": -1.5, "runtime_s": 600},
    "6": {"partial_db_range": [25.47, 28.47], "min_proposed_db": 40.0, "min_gain_db": 12.0, "runtime_s": 300},
    "7": {"max_jump_error": 1e-9, "max_recon_error": 1e-12, "runtime_s": 30},
    "8": {"max_ratio": 3.0, "runtime_s": 30},
    "9": {"max_1d": 1e-9, "max_2d": 1e-8, "runtime_s": 60},
    "10": {"runtime_s": 30},
}

NAMES = {
    "1": "standard-sum convergence",
    "2": "edge-augmented convergence, true jumps",
    "3": "edge-augmented convergence, estimated jumps",
    "4": "jump-estimation order",
    "5": "noise robustness",
    "6": "2D PSNR",
    "7": "exact recovery on ramp sums",
    "8": "error-bound compliance",
    "9": "oracle equivalence",
    "10": "estimated-jump error budget",
}


@dataclass
class CriterionResult:
    id: str
    name: str
    passed: bool
    measured: dict
    tolerance: dict
    runtime_s: float
    notes: str = ""

    def line(self):
        verdict = "PASS" if self.passed else "FAIL"
        shown = ", ".join(f"{k}={_short(v)}" for k, v in self.measured.items())
        return f"[{verdict}] criterion {self.id} ({self.name}): {shown}; {self.runtime_s:.1f} s"


@dataclass
class AcceptanceReport:
    criteria: list = field(default_factory=list)
    seed: int = 0
    schema: str = SCHEMA

    @property
    def passed(self):
        return all(c.passed for c in self.criteria)

    def to_dict(self):
        return {
            "schema": self.schema,
            "seed": self.seed,
            "passed": self.passed,
            "criteria": [vars(c) for c in self.criteria],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        return cls([CriterionResult(**c) for c in d["criteria"]], d["seed"], d["schema"])

    def summary(self):
        return "\n".join(c.line() for c in self.criteria)


def _short(v):
    if isinstance(v, float):
        return f"{v:.4g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_short(x) for x in v) + "]"
    return str(v)


def _fl(vs):
    return [float(v) for v in vs]


# --------------------------------------------------------------------------
# individual checks: each returns (passed, measured, notes)
# --------------------------------------------------------------------------


def check_1(tol, seed):
    h = function_h()
    errs = [standard_error(h, N) for N in POW2]
    s = convergence_slope(POW2, errs)
    lo, hi = tol["slope_range"]
    return lo <= s <= hi, {"slope": s, "errors": _fl(errs)}, ""


def check_2(tol, seed):
    h = function_h()
    truth = jump_set_of(h)
    errs = [edge_error(h, N, truth) for N in POW2]
    s = convergence_slope(POW2, errs)
    lo, hi = tol["slope_range"]
    return lo <= s <= hi, {"slope": s, "errors": _fl(errs)}, ""


def _estimators(truth):
    from .pipeline import make_estimator

    return {
        "prony": make_estimator("prony", prony=PronyConfig(order=len(truth))),
        "concentration": make_estimator("concentration"),
    }


def check_3(tol, seed):
    h = function_h()
    truth = jump_set_of(h)
    Ns = (64, 128, 256, 512)
    measured = {}
    ok = True
    for name, est in _estimators(truth).items():
        errs = []
        for N in Ns:
            c = fourier_coeffs_exact(h, N)
            errs.append(edge_error(h, N, est(c), c))
        s = convergence_slope(Ns, errs)
        measured[f"{name}_slope"] = s
        measured[f"{name}_errors"] = _fl(errs)
        ok &= s <= tol["max_slope"]
    notes = (
        "leading-order jump estimates carry location error O(1/N^2); the resulting sliver "
        "error a*sqrt(eps/2pi) limits the reconstruction slope to about -1"
    )
    return ok, measured, notes


def check_4(tol, seed):
    h = function_h()
    truth = jump_set_of(h)
    Ns = (25, 50, 100, 200, 400)
    measured = {}
    ok = True
    for name, est in _estimators(truth).items():
        eps = [match_jump_sets(truth, est(fourier_coeffs_exact(h, N))).eps_location for N in Ns]
        s = convergence_slope(Ns, eps)
        measured[f"{name}_slope"] = s
        measured[f"{name}_eps"] = _fl(eps)
        ok &= s <= tol["max_slope"]
    return ok, measured, ""


def check_5(tol, seed):
    h = function_h()
    truth = jump_set_of(h)
    est = _estimators(truth)
    Ns = (25, 50, 100, 200)
    hi = noise_sweep(h, est["concentration"], Ns, 70.0, 50, seed=seed, name="concentration")
    eps70 = [r.mean_eps for r in hi]
    s70 = convergence_slope(Ns, eps70)
    lo_c = noise_sweep(h, est["concentration"], Ns, 30.0, 50, seed=seed, name="concentration")
    lo_p = noise_sweep(h, est["prony"], Ns, 30.0, 50, seed=seed, name="prony")
    beats = [c.mean_eps < p.mean_eps for c, p in zip(lo_c, lo_p) if c.N >= 50]
    measured = {
        "conc_slope_70db": s70,
        "conc_eps_70db": _fl(eps70),
        "conc_eps_30db": _fl(r.mean_eps for r in lo_c),
        "prony_eps_30db": _fl(r.mean_eps for r in lo_p),
        "skip_fraction_30db_conc": _fl(r.skip_fraction for r in lo_c),
        "skip_fraction_30db_prony": _fl(r.skip_fraction for r in lo_p),
    }
    return s70 <= tol["max_slope_70db"] and all(beats), measured, ""


def check_6(tol, seed):
    f2 = function_f2()
    M, M_over = 256, 512
    spec = fourier_coeffs_2d_exact(f2, 25)
    ref = Grid2D.sample(f2, M)
    base = partial_sum_2d(spec, M)
    out = edge_augmented_2d(spec, M=M, M_over=M_over)
    p_base, p_out = psnr(ref, base), psnr(ref, out)
    lo, hi = tol["partial_db_range"]
    ok = lo <= p_base <= hi and p_out >= tol["min_proposed_db"] and p_out - p_base >= tol["min_gain_db"]
    # the same errors scored against a unit peak, for comparison with tools that assume one
    shift = 20.0 * math.log10(1.0 / float(np.max(np.abs(ref.values))))
    measured = {
        "psnr_partial_db": p_base,
        "psnr_proposed_db": p_out,
        "gain_db": p_out - p_base,
        "info_unit_peak_partial_db": p_base + shift,
        "info_unit_peak_proposed_db": p_out + shift,
    }
    notes = "PSNR uses peak = max|reference| = 0.75; info_* entries rescore with peak 1 and are not gated"
    return ok, measured, notes


def _random_ramp_sum(rng, N, max_J=5):
    J = int(rng.integers(1, max_J + 1))
    while True:
        x = np.sort(rng.uniform(-np.pi, np.pi, J))
        if J == 1 or np.min(circular_distance(x, np.roll(x, 1))) >= 2 * np.pi / N:
            break
    a = rng.choice([-1.0, 1.0], J) * rng.uniform(0.5, 2.0, J)
    return JumpSet(x, a)


def check_7(tol, seed, instances=100, N=64):
    rng = np.random.default_rng(seed)
    worst_eps = worst_delta = worst_rec = 0.0
    for _ in range(instances):
        truth = _random_ramp_sum(rng, N)
        c = ramp_spectrum(truth, N)
        err = match_jump_sets(truth, prony_estimate(c, PronyConfig(order=len(truth))))
        x = away_grid(truth, 2048)
        rec = np.max(np.abs(values_of(edge_augmented_sum(c, truth, x)) - ramp_sum_eval(truth, x)))
        worst_eps = max(worst_eps, err.eps_location)
        worst_delta = max(worst_delta, err.delta_height)
        worst_rec = max(worst_rec, float(rec))
    ok = max(worst_eps, worst_delta) <= tol["max_jump_error"] and worst_rec <= tol["max_recon_error"]
    return ok, {"max_eps": worst_eps, "max_delta": worst_delta, "max_recon_error": worst_rec}, ""


def check_8(tol, seed):
    h = function_h()
    truth = jump_set_of(h)
    edge = np.array([edge_error(h, N, truth) * N**1.5 for N in POW2])
    std = np.array([standard_error(h, N) * N**0.5 for N in POW2])
    r_edge = float(edge.max() / edge.min())
    r_std = float(std.max() / std.min())
    ok = r_edge < tol["max_ratio"] and r_std < tol["max_ratio"]
    return ok, {"edge_ratio": r_edge, "standard_ratio": r_std}, ""


def check_9(tol, seed):
    d1 = {}
    for name, make in CORPUS.items():
        f = make()
        d1[name] = float(np.max(np.abs(fourier_coeffs_exact(f, 128).coeffs - fourier_coeffs_quadrature(f, 128).coeffs)))
    d2 = 0.0
    shapes = [function_f1()] + list(function_f2().shapes)
    for shape in shapes:
        diff = fourier_coeffs_2d_exact(shape, 25).coeffs - fourier_coeffs_2d_quadrature(shape, 25).coeffs
        d2 = max(d2, float(np.max(np.abs(diff))))
    ok = max(d1.values()) <= tol["max_1d"] and d2 <= tol["max_2d"]
    measured = {f"max_diff_1d_{k}": v for k, v in d1.items()}
    measured["max_diff_2d"] = d2
    return ok, measured, ""


def check_10(tol, seed, N=64):
    h = function_h()
    truth = jump_set_of(h)
    c = fourier_coeffs_exact(h, N)
    c_tilde = decay_constant(c - ramp_spectrum(truth, N), 2)
    signs = (-1.0) ** np.arange(len(truth))
    levels = [1e-4, 1e-3, 1e-2]
    margins = []
    ok = True
    for eps in levels:
        for delta in levels:
            est = JumpSet(truth.locations + eps * signs, truth.heights + delta * signs)
            err = edge_error(h, N, est, c)
            bound = estimated_jump_budget(c_tilde, N, truth, eps, delta)
            margins.append(bound / err)
            ok &= err <= bound
    return ok, {"c_tilde": c_tilde, "min_bound_over_error": float(min(margins))}, ""


CHECKS = {str(i): globals()[f"check_{i}"] for i in range(1, 11)}


def resolve_tolerances(overrides=None):
    tol = copy.deepcopy(TOLERANCES)
    for key, vals in (overrides or {}).items():
        key = str(key)
        if key not in tol:
            raise ValueError(f"unknown acceptance criterion {key!r}")
        unknown = set(vals) - set(tol[key])
        if unknown:
            raise ValueError(f"criterion {key}: unknown tolerance keys {sorted(unknown)}")
        tol[key].update(vals)
    return tol


def run_acceptance(seed=0, tolerances=None, only=None, echo=None):
    """Run the checks (all, or the ids in ``only``) and collect a report.

    ``echo`` is called with each result line as soon as it is known.
    Exceptions inside a check are recorded as failures, never raised.
    """
    tol = resolve_tolerances(tolerances)
    report = AcceptanceReport(seed=int(seed))
    for key in only or CHECKS:
        key = str(key)
        t0 = time.perf_counter()
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                ok, measured, notes = CHECKS[key](tol[key], int(seed))
        except Exception as exc:  # a crashing check is a failed check, never an aborted report
            ok, measured, notes = False, {}, f"{type(exc).__name__}: {exc}"
        dt = time.perf_counter() - t0
        limit = tol[key]["runtime_s"]
        if dt > limit:
            notes = (notes + "; " if notes else "") + f"runtime {dt:.1f} s exceeds {limit} s"
        result = CriterionResult(key, NAMES[key], bool(ok) and dt <= limit, measured, tol[key], dt, notes)
        report.criteria.append(result)
        if echo is not None:
            echo(result.line())
    return report
