"""Command-line entry point for the updating benchmark.

Every option can come from a key=value config file (--config); explicit
command-line flags win over config values. Policies repeat: --policy zs
--policy sv:l=2 ... Exit status is 0 on success, 1 on any run failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import ExperimentConfig, run_experiment

_FLAG_KEYS = ("matrix", "queries", "qrels", "k", "t", "p", "policy", "alpha",
              "no-normalize", "n-points", "seed", "out", "max-docs")
_TRUE = ("1", "true", "yes", "on")
_FALSE = ("0", "false", "no", "off")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lsi-bench",
        description="Replay a document stream and compare SVD updating policies.",
    )
    parser.add_argument("--config", type=Path,
                        help="key=value file mirroring every flag")
    parser.add_argument("--matrix", type=Path, help="term-document MatrixMarket file")
    parser.add_argument("--queries", type=Path, help="query MatrixMarket file")
    parser.add_argument("--qrels", type=Path, help="TREC qrels file")
    parser.add_argument("--k", type=int, help="model rank")
    parser.add_argument("--t", type=int, help="initial document count")
    parser.add_argument("--p", type=int, help="documents added per step")
    parser.add_argument("--policy", action="append", dest="policies",
                        metavar="POLICY",
                        help="zs | ob | sv:l=N | gkl:l=N (repeatable)")
    parser.add_argument("--alpha", type=float, help="score splitting parameter")
    parser.add_argument("--no-normalize", action="store_true", default=None,
                        help="disable row normalization in scoring")
    parser.add_argument("--n-points", type=int, help="recall levels for avg precision")
    parser.add_argument("--seed", type=int, help="seed recorded with the run")
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--max-docs", type=int, help="cap on total documents")
    return parser


def read_config_file(path) -> dict:
    """Parse the key=value config form; keys mirror the flag names."""
    values: dict = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            key, eq, value = stripped.partition("=")
            key, value = key.strip(), value.strip()
            if not eq or not key:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            if key not in _FLAG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            if key == "policy":
                values.setdefault("policies", []).append(value)
            elif key in ("k", "t", "p", "n-points", "seed", "max-docs"):
                values[key.replace("-", "_")] = int(value)
            elif key == "alpha":
                values["alpha"] = float(value)
            elif key == "no-normalize":
                low = value.lower()
                if low not in _TRUE + _FALSE:
                    raise ValueError(f"{path}:{lineno}: bad boolean {value!r}")
                values["no_normalize"] = low in _TRUE
            else:
                values[key] = Path(value)
    return values


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    merged: dict = {}
    if args.config is not None:
        merged.update(read_config_file(args.config))
    for key in ("matrix", "queries", "qrels", "k", "t", "p", "policies",
                "alpha", "no_normalize", "n_points", "seed", "out", "max_docs"):
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    for required in ("matrix", "queries", "qrels", "k", "t", "p", "policies"):
        if merged.get(required) in (None, []):
            raise ValueError(f"missing required option --{required.replace('_', '-')}"
                             " (flag or config file)")
    return ExperimentConfig(
        matrix=merged["matrix"],
        queries=merged["queries"],
        qrels=merged["qrels"],
        k=merged["k"],
        t=merged["t"],
        p=merged["p"],
        policies=list(merged["policies"]),
        alpha=merged.get("alpha", 0.0),
        normalize=not merged.get("no_normalize", False),
        n_points=merged.get("n_points", 11),
        seed=merged.get("seed", 0),
        out=merged.get("out", Path("bench-out")),
        max_docs=merged.get("max_docs"),
    )


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = build_config(args)
        result = run_experiment(config)
    except (ValueError, OSError) as exc:
        print(f"lsi-bench: error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(result.records)} records to {result.csv_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
