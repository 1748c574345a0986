"""Command-line interface.

Thin client over the package: ``run`` executes a seeded experiment,
``replay`` drives the detector over an exported CSV stream, ``export``
writes a generated stream to CSV, and ``serve`` starts the HTTP service.

Exit codes: 0 success, 2 bad arguments, 3 I/O failure. The default output
directory comes from $CADM_OUT when --out is omitted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .core import write_stream_csv
from .datagen import DATASET_NAMES, make_stream
from .detector import CadmConfig
from .experiment import ExperimentSpec, replay, run_experiment, write_trace_csv

OUT_ENV_VAR = "CADM_OUT"


def parse_seeds(text: str) -> tuple:
    """Accepts '7', '1,2,5' or an inclusive range '1..10'."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            seeds = tuple(range(int(lo), int(hi) + 1))
        else:
            seeds = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise ValueError(f"cannot parse seed list {text!r}") from None
    if not seeds:
        raise ValueError("seed list is empty")
    return seeds


def _default_out() -> str:
    return os.environ.get(OUT_ENV_VAR, "cadm-out")


def _add_detector_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--classifier", choices=["gnb", "rls"], default="gnb")
    p.add_argument("--label-ratio", type=float, default=0.2,
                   help="fraction of each chunk bought from the oracle")
    p.add_argument("--window", type=int, default=10, help="similarity window size")
    p.add_argument("--k", type=float, default=2.0, help="deviation coefficient")
    p.add_argument("--chunk-size", type=int, default=200)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cadm",
                                     description="Confusion-model drift detection")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a seeded experiment")
    p_run.add_argument("--dataset", required=True,
                       help=f"one of {'|'.join(DATASET_NAMES)} or csv:<path>")
    _add_detector_args(p_run)
    p_run.add_argument("--chunks", type=int, default=500, help="number of chunks")
    p_run.add_argument("--drift-every", type=int, default=25,
                       help="label flip interval in chunks (0 = stationary)")
    p_run.add_argument("--tolerance", type=int, default=3,
                       help="matching tolerance in chunks")
    p_run.add_argument("--seeds", type=parse_seeds, default=(1,),
                       help="e.g. 7 | 1,2,5 | 1..10")
    p_run.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV_VAR})")
    p_run.add_argument("--jobs", type=int, default=1, help="parallel seed workers")
    p_run.add_argument("--no-detect", action="store_true",
                       help="disable the drift branch (baseline ablation)")

    p_replay = sub.add_parser("replay", help="run the detector over a CSV stream")
    p_replay.add_argument("--csv", required=True, help="stream file (f0,...,label schema)")
    _add_detector_args(p_replay)
    p_replay.add_argument("--seed", type=int, default=1)
    p_replay.add_argument("--out", default=None,
                          help="also write the trace CSV into this directory")

    p_export = sub.add_parser("export", help="write a generated stream to CSV")
    p_export.add_argument("--dataset", required=True, choices=list(DATASET_NAMES))
    p_export.add_argument("--seed", type=int, default=1)
    p_export.add_argument("--chunks", type=int, default=500)
    p_export.add_argument("--chunk-size", type=int, default=200)
    p_export.add_argument("--drift-every", type=int, default=25)
    p_export.add_argument("--out", required=True, help="destination CSV file")

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    return parser


def _cmd_run(args) -> int:
    spec = ExperimentSpec(
        dataset=args.dataset, classifier=args.classifier,
        label_ratio=args.label_ratio, window_size=args.window, k=args.k,
        chunk_size=args.chunk_size, n_chunks=args.chunks,
        drift_every=args.drift_every, tolerance=args.tolerance,
        seeds=args.seeds, detect=not args.no_detect, jobs=args.jobs)
    result = run_experiment(spec, args.out or _default_out())
    agg = result.summary["aggregate"]
    print(f"wrote {len(result.trace_paths)} trace files and {result.summary_path}")
    print(f"accuracy mean={agg['accuracy_mean']:.4f} "
          f"detection rate mean={agg['detection_rate_mean']:.4f} "
          f"false alarms mean={agg['false_alarms_mean']:.2f}")
    return 0


def _cmd_replay(args) -> int:
    config = CadmConfig(label_ratio=args.label_ratio, window_size=args.window,
                        k=args.k, seed=args.seed, classifier=args.classifier)
    report = replay(args.csv, config, args.chunk_size)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_trace_csv(out / f"trace_seed{args.seed}.csv", report.traces)
    print(json.dumps({"drifts": report.drifts, "accuracy": report.accuracy,
                      "labels_spent": report.labels_spent}))
    return 0


def _cmd_export(args) -> int:
    stream = make_stream(args.dataset, chunk_size=args.chunk_size,
                         n_chunks=args.chunks, seed=args.seed,
                         drift_every=args.drift_every)
    rows = write_stream_csv(stream, args.out)
    print(f"wrote {rows} samples to {args.out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "replay": _cmd_replay,
                "export": _cmd_export, "serve": _cmd_serve}
    try:
        return handlers[args.command](args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
