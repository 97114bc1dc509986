"""Write a relation-label file sampled from a labelled dataset.

The output is the `i,j,must|cannot` format read by `--relations`.

Usage:
    PYTHONPATH=src python scripts/sample_relations.py synthetic:blobs?n=600 100 relations.csv
    PYTHONPATH=src python scripts/sample_relations.py data.csv 40 out.csv --seed 3
"""

from __future__ import annotations

import argparse
import sys
from typing import Any

from errssl.domain.dataset import sample_relation_labels
from errssl.errors import ErrsslError
from errssl.infrastructure.adapters.dataset_files import FileDatasetSource, write_relation_labels


def eprint(*args: Any, **kwargs: Any) -> None:
    print(*args, file=sys.stderr, **kwargs)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="Sample must-link/cannot-link pairs")
    parser.add_argument("dataset", help="CSV/libsvm path or synthetic:<name>?key=value&...")
    parser.add_argument("count", type=int, help="Number of pairs s_R (even)")
    parser.add_argument("output", help="Relation-label file to write")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--label-col", default="label")
    args = parser.parse_args(argv)

    try:
        ds = FileDatasetSource(label_col=args.label_col).load_dataset(args.dataset)
        labels = sample_relation_labels(ds, args.count, args.seed)
        write_relation_labels(labels, args.output)
    except ErrsslError as exc:
        eprint(f"Error: {exc}")
        return 1

    must = int(labels.must.sum())
    print(f"wrote {labels.s_r} pairs ({must} must, {labels.s_r - must} cannot) to {args.output}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
