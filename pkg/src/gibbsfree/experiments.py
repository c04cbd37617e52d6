"""Experiment runners behind the command line: configs, tables and plots."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .concentration import DetectionConfig
from .errors import EmptySeries, GibbsFreeError
from .functions import (
    CORPUS,
    SHAPES_2D,
    JumpSet,
    fourier_coeffs_2d_exact,
    fourier_coeffs_exact,
    get_function,
    jump_set_of,
)
from .io import atomic_write_bytes, atomic_write_text
from .noise import noise_sweep, sweep_to_csv
from .pipeline import make_estimator
from .plotting import Series, plot
from .prony import PronyConfig
from .recon2d import Grid2D, edge_augmented_2d, partial_sum_2d, psnr
from .spectral import (
    convergence_slope,
    edge_augmented_sum,
    edge_error,
    partial_sum,
    standard_error,
    uniform_grid,
)

EXPERIMENTS = ("reconstruct1d", "detect", "convergence", "noise-sweep", "recon2d", "acceptance")
CONVERGENCE_COLUMNS = ("N", "error_standard", "error_edge_true", "error_edge_prony", "error_edge_conc")
DEFAULT_NS = (16, 32, 64, 128, 256, 512)
THREADS_ENV = "GIBBSFREE_THREADS"


@dataclass
class ExperimentConfig:
    """Every knob of every experiment; JSON keys equal field names.

    Command-line flags mirror these fields and override values read from
    ``--config``.
    """

    experiment: str = "convergence"
    function: str = "h"
    Ns: tuple = DEFAULT_NS
    band: int = 64
    points: int = 1024
    detector: str = "conc"
    factor: str = "trig"
    alpha: float | None = None
    poly_order: int = 1
    threshold: float = 0.4
    refine: bool = True
    refine_model: str = "jump"
    prony_J: int | None = None
    prony_kmin: int | None = None
    prony_auto_order: bool = False
    snr_db: float = 70.0
    trials: int = 50
    seed: int = 0
    threads: int | None = None
    grid: int = 256
    oversample: int | None = None
    out: str = "out"
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        self.Ns = tuple(int(n) for n in self.Ns)
        if not self.Ns or any(b <= a for a, b in zip(self.Ns, self.Ns[1:])) or self.Ns[0] < 1:
            raise ValueError("Ns must be a nonempty strictly ascending list of positive integers")
        if self.experiment == "recon2d":
            if self.function not in SHAPES_2D:
                raise ValueError(f"unknown 2D function {self.function!r}; choose from {sorted(SHAPES_2D)}")
        elif self.experiment != "acceptance" and self.function not in CORPUS:
            raise ValueError(f"unknown function {self.function!r}; choose from {sorted(CORPUS)}")
        if self.detector not in ("conc", "concentration", "prony"):
            raise ValueError(f"unknown detector {self.detector!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @classmethod
    def from_dict(cls, d):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["Ns"] = list(self.Ns)
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def resolved_threads(self):
        if self.threads is not None:
            return max(1, int(self.threads))
        return max(1, int(os.environ.get(THREADS_ENV, "1")))

    def detection(self):
        return DetectionConfig(threshold_rel=self.threshold, refine=self.refine, refine_model=self.refine_model)

    def prony(self, truth=None):
        if self.prony_J is not None:
            order = int(self.prony_J)
        elif self.prony_auto_order or truth is None:
            order = "auto"
        else:
            # the jump count is taken as known unless auto order is requested
            order = len(truth)
        return PronyConfig(order=order, k_min=self.prony_kmin)

    def estimator(self, kind=None, truth=None):
        kind = kind or self.detector
        if kind == "prony":
            return make_estimator("prony", prony=self.prony(truth))
        return make_estimator(
            "concentration",
            factor=self.factor,
            detection=self.detection(),
            alpha=self.alpha,
            poly_order=self.poly_order,
        )


def _out(cfg, name):
    return Path(cfg.out) / name


def _safe(estimate, spec1d):
    try:
        return estimate(spec1d)
    except (GibbsFreeError, np.linalg.LinAlgError):
        return None


def run_reconstruct1d(cfg):
    """Edge-augmented reconstruction of one corpus function at ``cfg.band``.

    Writes the reconstruction as ``x,value`` CSV and a linear plot with the
    function and its plain partial sum.
    """
    f = get_function(cfg.function)
    N = cfg.band
    c = fourier_coeffs_exact(f, N)
    jumps = _safe(cfg.estimator(truth=jump_set_of(f)), c)
    jumps = JumpSet() if jumps is None else jumps
    x = uniform_grid(cfg.points)
    rec = edge_augmented_sum(c, jumps, x)
    stem = f"reconstruct1d_{cfg.function}_N{N}"
    paths = {"csv": atomic_write_text(_out(cfg, stem + ".csv"), rec.to_csv())}
    series = [
        Series.of(cfg.function, x, f(x)),
        Series.of("partial sum", x, partial_sum(c, x).values),
        Series.of("edge-augmented", x, rec.values),
    ]
    plot(series, "linear", _out(cfg, stem + ".svg"), title=f"{cfg.function}, N = {N}", xlabel="x", ylabel="value")
    paths["svg"] = _out(cfg, stem + ".svg")
    return paths


def run_detect(cfg):
    """Estimated jumps of one corpus function as ``location,height`` CSV."""
    f = get_function(cfg.function)
    c = fourier_coeffs_exact(f, cfg.band)
    jumps = cfg.estimator(truth=jump_set_of(f))(c)
    path = atomic_write_text(_out(cfg, f"jumps_{cfg.function}_N{cfg.band}_{cfg.detector}.csv"), jumps.to_csv())
    return {"csv": path, "jumps": jumps}


def convergence_rows(cfg):
    """``(N, standard, edge with true jumps, edge with Prony, edge with concentration)``.

    An estimator that fails at some N contributes NaN there; the other
    columns are still computed.
    """
    f = get_function(cfg.function)
    truth = jump_set_of(f)
    prony = cfg.estimator("prony", truth)
    conc = cfg.estimator("conc", truth)

    def one(N):
        c = fourier_coeffs_exact(f, N)
        row = [N, standard_error(f, N), edge_error(f, N, truth, c)]
        for est in (prony, conc):
            jumps = _safe(est, c)
            row.append(math.nan if jumps is None else edge_error(f, N, jumps, c))
        return tuple(row)

    threads = cfg.resolved_threads()
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(one, cfg.Ns))
    return [one(N) for N in cfg.Ns]


def convergence_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CONVERGENCE_COLUMNS)
    for r in rows:
        w.writerow([r[0]] + [repr(float(v)) for v in r[1:]])
    return buf.getvalue()


def _slope_or_none(Ns, errs):
    ok = [(n, e) for n, e in zip(Ns, errs) if np.isfinite(e) and e > 0]
    if len(ok) < 4:
        return None
    try:
        return convergence_slope(*zip(*ok))
    except GibbsFreeError:
        return None


def run_convergence(cfg):
    """L2 errors of all reconstructions across ``cfg.Ns``: CSV plus log-log SVG."""
    rows = convergence_rows(cfg)
    stem = f"convergence_{cfg.function}"
    result = {"rows": rows, "csv": atomic_write_text(_out(cfg, stem + ".csv"), convergence_csv(rows))}
    Ns = [r[0] for r in rows]
    labels = ("standard", "edge, true jumps", "edge, Prony", "edge, concentration")
    series, notes, slopes = [], [], {}
    for i, label in enumerate(labels, start=1):
        errs = [r[i] for r in rows]
        series.append(Series.of(label, Ns, errs))
        s = _slope_or_none(Ns, errs)
        slopes[label] = s
        if s is not None:
            notes.append(f"{label}: slope {s:.2f}")
    result["slopes"] = slopes
    try:
        plot(series, "loglog", _out(cfg, stem + ".svg"), title=f"L2 error, {cfg.function}", xlabel="N",
             ylabel="L2 error", notes=notes)
        result["svg"] = _out(cfg, stem + ".svg")
    except EmptySeries:
        result["notice"] = "all errors are zero; plot skipped"
    return result


def run_noise_sweep(cfg):
    """Mean jump errors of both estimators at ``cfg.snr_db`` over ``cfg.Ns``."""
    f = get_function(cfg.function)
    truth = jump_set_of(f)
    rows = []
    for kind, name in (("conc", "concentration"), ("prony", "prony")):
        rows += noise_sweep(f, cfg.estimator(kind, truth), cfg.Ns, cfg.snr_db, cfg.trials, seed=cfg.seed,
                            name=name, threads=cfg.resolved_threads())
    tag = "inf" if math.isinf(cfg.snr_db) else f"{cfg.snr_db:g}"
    stem = f"noise_{cfg.function}_{tag}dB"
    result = {"rows": rows, "csv": atomic_write_text(_out(cfg, stem + ".csv"), sweep_to_csv(rows))}
    series = [
        Series.of(name, [r.N for r in rows if r.estimator == name], [r.mean_eps for r in rows if r.estimator == name])
        for name in ("concentration", "prony")
    ]
    try:
        plot(series, "loglog", _out(cfg, stem + ".svg"), title=f"mean location error, {tag} dB",
             xlabel="N", ylabel="mean location error")
        result["svg"] = _out(cfg, stem + ".svg")
    except EmptySeries:
        result["notice"] = "no finite errors; plot skipped"
    return result


def run_recon2d(cfg):
    """Partial-sum and edge-augmented 2D reconstructions with their PSNR."""
    shape = SHAPES_2D[cfg.function]()
    N, M = cfg.band, cfg.grid
    M_over = cfg.oversample or 2 * M
    spec = fourier_coeffs_2d_exact(shape, N)
    ref = Grid2D.sample(shape, M)
    base = partial_sum_2d(spec, M)
    t0 = time.perf_counter()
    detector = cfg.estimator()
    out, diag = edge_augmented_2d(spec, detector, M=M, M_over=M_over, threads=cfg.resolved_threads(),
                                  return_diagnostics=True)
    seconds = time.perf_counter() - t0
    stem = f"recon2d_{cfg.function}_N{N}_M{M}"
    atomic_write_bytes(_out(cfg, stem + ".g2d"), out.to_bytes())
    atomic_write_bytes(_out(cfg, stem + ".pgm"), out.to_pgm())
    atomic_write_bytes(_out(cfg, stem + "_partial.pgm"), base.to_pgm())
    summary = {
        "function": cfg.function,
        "N": N,
        "M": M,
        "M_over": M_over,
        "detector": cfg.detector,
        "psnr_partial_sum": psnr(ref, base),
        "psnr_proposed": psnr(ref, out),
        "row_failures": diag.row_failures,
        "column_failures": diag.column_failures,
    }
    atomic_write_text(_out(cfg, stem + ".json"), json.dumps(summary, indent=2, sort_keys=True) + "\n")
    summary["seconds"] = seconds
    summary["grid"] = out
    return summary
