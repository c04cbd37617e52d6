"""``gibbsfree`` command line: one subcommand per experiment.

Flags mirror :class:`~gibbsfree.experiments.ExperimentConfig` fields; values
given on the command line win over those read from ``--config``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .acceptance import run_acceptance
from .experiments import (
    ExperimentConfig,
    run_convergence,
    run_detect,
    run_noise_sweep,
    run_reconstruct1d,
    run_recon2d,
)
from .io import atomic_write_text

FACTOR_CHOICES = ("trig", "poly", "exp", "trigonometric", "polynomial", "exponential")


def _u64(text):
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _ns(text):
    return tuple(int(t) for t in text.replace(",", " ").split())


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global")
    g.add_argument("--config", type=Path, help="JSON file with ExperimentConfig keys")
    g.add_argument("--out", help="output directory")
    g.add_argument("--seed", type=_u64, help="master seed (unsigned 64-bit)")
    g.add_argument("--threads", type=int, help="worker threads (fallback: $GIBBSFREE_THREADS)")

    est = argparse.ArgumentParser(add_help=False)
    e = est.add_argument_group("estimator")
    e.add_argument("--function", help="corpus function id (h, s, zero, smooth; f1, f2 for recon2d)")
    e.add_argument("--band", type=int, help="band limit N")
    e.add_argument("--detector", choices=("conc", "prony"))
    e.add_argument("--factor", choices=FACTOR_CHOICES)
    e.add_argument("--alpha", type=float)
    e.add_argument("--poly-order", dest="poly_order", type=int)
    e.add_argument("--threshold", type=float, help="peak threshold relative to max |K|")
    e.add_argument("--no-refine", dest="refine", action="store_const", const=False)
    e.add_argument("--refine-model", dest="refine_model", choices=("jump", "jump+slope"))
    e.add_argument("--prony-J", dest="prony_J", type=int)
    e.add_argument("--prony-kmin", dest="prony_kmin", type=int)
    e.add_argument("--prony-auto-order", dest="prony_auto_order", action="store_const", const=True)

    sweep = argparse.ArgumentParser(add_help=False)
    sweep.add_argument("--Ns", type=_ns, help="band limits, e.g. '16,32,64'")

    parser = argparse.ArgumentParser(prog="gibbsfree", description="Jump-aware Fourier reconstruction experiments.")
    sub = parser.add_subparsers(dest="experiment", required=True)
    sub.add_parser("reconstruct1d", parents=[common, est], help="edge-augmented 1D reconstruction").add_argument(
        "--points", type=int, help="output grid size"
    )
    sub.add_parser("detect", parents=[common, est], help="estimate jumps of a corpus function")
    sub.add_parser("convergence", parents=[common, est, sweep], help="L2 errors across band limits")
    p = sub.add_parser("noise-sweep", parents=[common, est, sweep], help="jump errors under noise")
    p.add_argument("--snr-db", dest="snr_db", type=float)
    p.add_argument("--trials", type=int)
    p = sub.add_parser("recon2d", parents=[common, est], help="row-then-column 2D reconstruction")
    p.add_argument("--grid", type=int, help="output grid size M")
    p.add_argument("--oversample", type=int, help="oversampled y-nodes M_over (default 2M)")
    p = sub.add_parser("acceptance", parents=[common], help="run the acceptance checks")
    p.add_argument("--only", type=lambda t: [s for s in t.split(",") if s], help="comma-separated check ids")
    return parser


def config_from_args(args):
    base = {}
    if args.config is not None:
        base = json.loads(Path(args.config).read_text())
    base["experiment"] = args.experiment
    if args.experiment == "recon2d" and "function" not in base and args.function is None:
        base["function"] = "f2"
    if args.experiment == "recon2d" and "band" not in base and args.band is None:
        base["band"] = 25
    if args.experiment == "noise-sweep" and "Ns" not in base and getattr(args, "Ns", None) is None:
        base["Ns"] = [25, 50, 100, 200]
    skip = {"config", "experiment", "only"}
    for key, value in vars(args).items():
        if key in skip or value is None:
            continue
        base[key] = value
    if "factor" in base:
        base["factor"] = {"trigonometric": "trig", "polynomial": "poly", "exponential": "exp"}.get(
            base["factor"], base["factor"]
        )
    return ExperimentConfig.from_dict(base)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"gibbsfree: {exc}", file=sys.stderr)
        return 2
    out = Path(cfg.out)

    if cfg.experiment == "acceptance":
        report = run_acceptance(cfg.seed, cfg.tolerances, only=args.only, echo=print)
        path = atomic_write_text(out / "acceptance.json", report.to_json())
        print(f"report: {path}")
        return 0 if report.passed else 1

    runners = {
        "reconstruct1d": run_reconstruct1d,
        "detect": run_detect,
        "convergence": run_convergence,
        "noise-sweep": run_noise_sweep,
        "recon2d": run_recon2d,
    }
    result = runners[cfg.experiment](cfg)
    if cfg.experiment == "convergence":
        for label, s in result["slopes"].items():
            print(f"{label}: slope {'n/a' if s is None else f'{s:.3f}'}")
    elif cfg.experiment == "recon2d":
        print(f"PSNR partial sum {result['psnr_partial_sum']:.2f} dB, proposed {result['psnr_proposed']:.2f} dB")
    elif cfg.experiment == "noise-sweep":
        for r in result["rows"]:
            print(f"N={r.N} {r.estimator}: mean eps {r.mean_eps:.3g}, skipped {r.skip_fraction:.0%}")
    elif cfg.experiment == "detect":
        for x, a in result["jumps"]:
            print(f"{x:+.6f} {a:+.6f}")
    if "notice" in result:
        print(result["notice"])
    print(f"outputs in {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
