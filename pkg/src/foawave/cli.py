"""Command line entry point: ``foawave simulate|evaluate|verify|bench``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import dataset_io
from .bench import checksums_agree, run_bench
from .config import RunConfig
from .errors import EmptyInput, FoaError
from .foa import simulate
from .metrics import aggregate
from .verification import run_suite

log = logging.getLogger("foawave")

EXIT_OK, EXIT_ERROR, EXIT_VERIFY = 0, 1, 2
REPORT_COLUMNS = ("stimulus", "auc", "nss", "sed_mean", "sed_best", "stde_mean", "stde_best")


def _common(p):
    p.add_argument("--config", help="JSON file with flat RunConfig keys")
    p.add_argument("--model", choices=("H", "DW", "custom"))
    p.add_argument("--seed", type=int)
    p.add_argument("--duration", type=float, help="simulated exposure, s")
    p.add_argument("--n", type=int, dest="n_scanpaths", help="scanpaths per stimulus")
    p.add_argument("--scheme", choices=("explicit", "implicit"))
    p.add_argument("--out", help="output directory")
    p.add_argument("--snapshots", type=int, metavar="STRIDE",
                   help="dump the potential every STRIDE steps (0 = off)")
    p.add_argument("--threads", type=int)


def build_parser():
    parser = argparse.ArgumentParser(prog="foawave", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate scanpaths on one stimulus")
    p.add_argument("stimulus", help="PGM image or directory of PGM frames")
    _common(p)

    p = sub.add_parser("evaluate", help="score model scanpaths against human fixations")
    p.add_argument("stimuli", help="directory of <id>.pgm files or <id>/ frame directories")
    p.add_argument("fixations", help="directory of <id>.csv human fixation files")
    p.add_argument("--predictions",
                   help="use scanpaths from <dir>/<id>.csv or <dir>/<id>/*.json instead of simulating")
    _common(p)

    p = sub.add_parser("verify", help="run the oracle suite")
    p.add_argument("--grid", type=int, dest="verify_grid",
                   help="shrink every check to this grid size (smoke run)")
    _common(p)

    p = sub.add_parser("bench", help="stepper throughput and thread-count determinism")
    p.add_argument("--sizes", type=int, nargs="+", dest="bench_sizes")
    p.add_argument("--thread-counts", type=int, nargs="+", dest="bench_threads")
    p.add_argument("--steps", type=int, dest="bench_steps")
    _common(p)
    return parser


def resolve_config(args):
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    keys = ("model", "seed", "duration", "n_scanpaths", "scheme", "out", "snapshots", "threads",
            "verify_grid", "bench_sizes", "bench_threads", "bench_steps")
    changes = {k: getattr(args, k, None) for k in keys}
    for k in ("bench_sizes", "bench_threads"):
        if changes[k] is not None:
            changes[k] = tuple(changes[k])
    return cfg.override(**changes).resolved()


def _write_json(path, doc):
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _stimulus_id(path):
    path = Path(path)
    return path.name if path.is_dir() else path.stem


def _simulate_many(cfg, frames, stimulus, snapshot_dir=None):
    pde = cfg.pde_params()
    seeds = [cfg.seed + i for i in range(cfg.n_scanpaths)]

    def one(seed):
        on_step = None
        if snapshot_dir is not None and cfg.snapshots > 0:
            target = Path(snapshot_dir) / f"{stimulus}_seed{seed}"
            target.mkdir(parents=True, exist_ok=True)

            def on_step(n, state, foa):
                if (n + 1) % cfg.snapshots == 0:
                    dataset_io.write_field_pgm(target / f"phi_{n + 1:05d}.pgm", state.phi_curr)

        return simulate(frames, cfg.duration, pde, cfg.mass_params(), cfg.dynamics_params(seed),
                        cfg.scheme, threads=1, stimulus=stimulus, model=cfg.model, on_step=on_step)

    if cfg.threads > 1 and len(seeds) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            return list(pool.map(one, seeds))
    return [one(s) for s in seeds]


def cmd_simulate(args):
    cfg = resolve_config(args)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "config.resolved.json", cfg.as_dict())
    frames = dataset_io.load_frames(args.stimulus, fps=1.0 / cfg.tau)
    stimulus = _stimulus_id(args.stimulus)
    results = _simulate_many(cfg, frames, stimulus, snapshot_dir=out / "snapshots")
    lines = []
    for res in results:
        path = res.scanpath
        dataset_io.write_scanpath_json(out / f"{stimulus}_seed{path.seed}.json", path)
        line = (f"simulate stimulus={stimulus} model={cfg.model} seed={path.seed} "
                f"pde_steps={res.pde_steps} fixations={len(path)}")
        log.info(line)
        lines.append(line)
    (out / "simulate.log").write_text("\n".join(lines) + "\n")
    return EXIT_OK


def _model_paths(cfg, rec, frames, grid, predictions):
    if predictions is None:
        return [r.scanpath for r in _simulate_many(cfg, frames, rec.id)]
    pred = Path(predictions)
    csv_path = pred / f"{rec.id}.csv"
    if csv_path.is_file():
        paths, _ = dataset_io.load_fixations_csv(csv_path, grid)
        return [paths[k] for k in sorted(paths)]
    files = sorted((pred / rec.id).glob("*.json")) if (pred / rec.id).is_dir() else []
    if not files:
        raise EmptyInput(f"no predictions for {rec.id} in {pred}")
    return [dataset_io.read_scanpath_json(f) for f in files]


def evaluate_dataset(cfg, stimuli, fixations, predictions=None):
    """Per-stimulus metric rows, their column means and the skipped ids."""
    cfg = cfg.resolved()
    records, unmatched = dataset_io.scan_dataset(stimuli, fixations)
    for sid in unmatched:
        log.warning("MissingGroundTruth: no %s.csv for stimulus %s, skipped", sid, sid)
    if not records:
        raise EmptyInput(f"no stimulus in {stimuli} has ground truth in {fixations}")
    rows = []
    for rec in records:
        frames = [dataset_io.load_pgm(p, i * cfg.tau) for i, p in enumerate(rec.frame_paths)]
        grid = frames[0].grid
        humans, _ = dataset_io.load_fixations_csv(rec.fixation_files[0], grid)
        if not humans:
            raise EmptyInput(f"{rec.fixation_files[0]} has no fixations")
        human_paths = [humans[k] for k in sorted(humans)]
        model_paths = _model_paths(cfg, rec, frames, grid, predictions)
        report = aggregate(model_paths, human_paths, cfg.eval_config(grid))
        rows.append({"stimulus": rec.id, **report.as_dict()})
    summary = {}
    for col in REPORT_COLUMNS[1:]:
        vals = [r[col] for r in rows if not math.isnan(r[col])]
        summary[col] = float(np.mean(vals)) if vals else math.nan
    return rows, summary, unmatched


def _jsonable(v):
    return None if isinstance(v, float) and math.isnan(v) else v


def cmd_evaluate(args):
    cfg = resolve_config(args)
    rows, summary, skipped = evaluate_dataset(cfg, args.stimuli, args.fixations, args.predictions)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "config.resolved.json", cfg.as_dict())
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow(r)
    writer.writerow({"stimulus": "ALL", **summary})
    (out / "metrics.csv").write_text(buf.getvalue())
    _write_json(out / "metrics.json", {
        "model": cfg.model if args.predictions is None else "predictions",
        "rows": [{k: _jsonable(v) for k, v in r.items()} for r in rows],
        "aggregate": {k: _jsonable(v) for k, v in summary.items()},
        "skipped": len(skipped),
        "skipped_ids": skipped,
    })
    sys.stdout.write(buf.getvalue())
    log.info("evaluated %d stimuli, skipped %d", len(rows), len(skipped))
    return EXIT_OK


def cmd_verify(args):
    cfg = resolve_config(args)
    results = run_suite(pde=cfg.pde_params(), scheme=cfg.scheme, grid=cfg.verify_grid,
                        threads=cfg.threads)
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print("verify: " + ("all checks passed" if ok else "FAILED"))
    if args.out:
        Path(cfg.out).mkdir(parents=True, exist_ok=True)
        _write_json(Path(cfg.out) / "verify.json", {
            "passed": ok,
            "checks": [{"name": r.name, "passed": r.passed, "skipped": r.skipped,
                        "measured": _jsonable(r.measured), "tolerance": _jsonable(r.tolerance),
                        "detail": r.detail} for r in results],
        })
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_bench(args):
    cfg = resolve_config(args)
    rows = run_bench(cfg.pde_params(), cfg.bench_sizes, cfg.bench_threads, cfg.bench_steps)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    sys.stdout.write(buf.getvalue())
    if args.out:
        Path(cfg.out).mkdir(parents=True, exist_ok=True)
        (Path(cfg.out) / "bench.csv").write_text(buf.getvalue())
    ok = checksums_agree(rows)
    print("bench: checksums " + ("identical across thread counts" if ok else "DIFFER"))
    return EXIT_OK if ok else EXIT_VERIFY


COMMANDS = {"simulate": cmd_simulate, "evaluate": cmd_evaluate, "verify": cmd_verify,
            "bench": cmd_bench}


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (FoaError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
