"""Summary table of saliency and scanpath scores for several model presets.

Runs the ``evaluate`` pipeline once per model over a dataset laid out as
``STIM_DIR/<id>.pgm`` (or ``<id>/`` frame directories) and
``FIX_DIR/<id>.csv`` and prints one row per model with the columns
AUC, NSS, SED mean, SED best, STDE mean, STDE best (dataset means).

    python scripts/benchmark_report.py STIM_DIR FIX_DIR --models H DW --out report.csv
"""

import argparse
import csv
import logging
import sys

from foawave.cli import evaluate_dataset
from foawave.config import RunConfig

COLUMNS = [("auc", "AUC"), ("nss", "NSS"), ("sed_mean", "SED mean"), ("sed_best", "SED best"),
           ("stde_mean", "STDE mean"), ("stde_best", "STDE best")]


def build_table(stimuli, fixations, models, base=None, predictions=None):
    base = base or RunConfig()
    table = []
    for model in models:
        cfg = base.override(model=model)
        rows, summary, skipped = evaluate_dataset(cfg, stimuli, fixations, predictions)
        table.append({"model": model, "stimuli": len(rows), "skipped": len(skipped), **summary})
    return table


def format_table(table):
    head = ["model"] + [label for _, label in COLUMNS]
    lines = ["  ".join(f"{h:>9}" for h in head)]
    for row in table:
        cells = [f"{row['model']:>9}"] + [f"{row[k]:>9.3f}" for k, _ in COLUMNS]
        lines.append("  ".join(cells))
    return "\n".join(lines)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("stimuli")
    p.add_argument("fixations")
    p.add_argument("--models", nargs="+", default=["H", "DW"])
    p.add_argument("--config", help="RunConfig JSON applied to every model")
    p.add_argument("--n", type=int, default=5, help="scanpaths per stimulus")
    p.add_argument("--duration", type=float, default=5.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--predictions", help="score precomputed scanpaths instead of simulating")
    p.add_argument("--out", help="write the table as CSV")
    args = p.parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")

    base = RunConfig.load(args.config) if args.config else RunConfig()
    base = base.override(n_scanpaths=args.n, duration=args.duration, seed=args.seed,
                         threads=args.threads)
    table = build_table(args.stimuli, args.fixations, args.models, base, args.predictions)
    print(format_table(table))
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["model"] + [label for _, label in COLUMNS] + ["stimuli", "skipped"])
            for row in table:
                writer.writerow([row["model"]] + [row[k] for k, _ in COLUMNS]
                                + [row["stimuli"], row["skipped"]])
    return 0


if __name__ == "__main__":
    sys.exit(main())
