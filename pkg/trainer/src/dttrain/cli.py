"""dttrain command line: CSV in, interchange tree + instances file out."""

import argparse
import sys

from .training import TrainingConfig, TrainingError, train_and_export


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dttrain",
        description="Train a decision tree on a CSV file (last column is the "
                    "class label) and export it to the finite-domain "
                    "interchange format",
    )
    parser.add_argument("csv", help="training data; header row, label last")
    parser.add_argument("--max-depth", type=int, default=16)
    parser.add_argument("--bins", type=int, default=8,
                        help="max ordered bins per numeric column")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-tree", required=True,
                        help="where to write the interchange JSON")
    parser.add_argument("--out-instances", required=True,
                        help="where to write the exported training instances")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.max_depth < 1:
        parser.error("--max-depth must be >= 1")
    if args.bins < 2:
        parser.error("--bins must be >= 2")
    config = TrainingConfig(max_depth=args.max_depth, seed=args.seed,
                            bins=args.bins)
    try:
        doc_text, instances_text = train_and_export(args.csv, config)
        with open(args.out_tree, "w", encoding="utf-8") as fh:
            fh.write(doc_text)
        with open(args.out_instances, "w", encoding="utf-8") as fh:
            fh.write(instances_text)
    except TrainingError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
