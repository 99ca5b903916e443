#!/usr/bin/env python3
"""Run the updating benchmark; equivalent to the installed lsi-bench command.

Example:
    python scripts/run_benchmark.py --config presets/synthetic_20x30.cfg
"""

import sys

from lsiupdate.cli import main

if __name__ == "__main__":
    sys.exit(main())
