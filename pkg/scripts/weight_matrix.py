#!/usr/bin/env python3
"""Apply SMART-style weighting to a raw count matrix in MatrixMarket form.

Typical preparation of a collection and its queries:
    python scripts/weight_matrix.py --counts raw_docs.mtx --out data/medline/matrix.mtx \
        --scheme lxn.bpx --side document
    python scripts/weight_matrix.py --counts raw_queries.mtx --out data/medline/queries.mtx \
        --scheme lxn.bpx --side query --df-source raw_docs.mtx
"""

import argparse
from pathlib import Path

from lsiupdate.ingest import (
    WeightingScheme,
    apply_weighting,
    read_matrix_market,
    write_matrix_market,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--counts", type=Path, required=True,
                        help="raw term counts, MatrixMarket coordinate form")
    parser.add_argument("--out", type=Path, required=True)
    parser.add_argument("--scheme", default="lxn.bpx",
                        help="document and query triples, dotted")
    parser.add_argument("--side", choices=["document", "query"], default="document")
    parser.add_argument("--df-source", type=Path,
                        help="count matrix supplying document frequencies "
                             "(pass the collection when weighting queries)")
    args = parser.parse_args()
    scheme = WeightingScheme.parse(args.scheme)
    counts = read_matrix_market(args.counts)
    df_source = read_matrix_market(args.df_source) if args.df_source else None
    weighted = apply_weighting(counts, scheme, args.side, df_source=df_source)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_matrix_market(weighted, args.out)
    print(f"wrote {weighted.rows}x{weighted.cols} matrix "
          f"({weighted.nnz} entries) to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
