#!/usr/bin/env python3
"""Generate the synthetic smoke dataset used by presets/synthetic_20x30.cfg."""

import argparse
from pathlib import Path

from lsiupdate.bench import make_synthetic_dataset


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("data/synthetic"))
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--terms", type=int, default=20)
    parser.add_argument("--documents", type=int, default=30)
    parser.add_argument("--queries", type=int, default=5)
    args = parser.parse_args()
    paths = make_synthetic_dataset(args.out, seed=args.seed, terms=args.terms,
                                   documents=args.documents, n_queries=args.queries)
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
