#!/usr/bin/env python3
"""Score every issuer variant with the attack battery and print the matrix."""

import argparse
import json

from rewardsim import comparison_matrix, render_matrix, run_battery
from rewardsim.issuers import MATRIX_VARIANTS


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cycles", type=int, default=12,
                        help="billing cycles per attack scenario")
    parser.add_argument("--json", action="store_true", help="emit rows as JSON")
    args = parser.parse_args()

    battery = {
        name: run_battery(name, cycles=args.cycles)
        for name in MATRIX_VARIANTS + ["V3a"]
    }
    rows = comparison_matrix(battery)
    if args.json:
        print(json.dumps(rows, indent=2, ensure_ascii=False))
    else:
        print(render_matrix(rows), end="")


if __name__ == "__main__":
    main()
