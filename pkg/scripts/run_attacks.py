#!/usr/bin/env python3
"""Run the refund double-dip across all variants and timings, one row each."""

import argparse

from rewardsim import run_ddra
from rewardsim.adversary import CROSS_CYCLE, SAME_CYCLE
from rewardsim.issuers import VARIANTS
from rewardsim.money import format_usd


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cycles", type=int, default=12)
    parser.add_argument("--purchase", type=int, default=100_00,
                        help="purchase size in minor units")
    args = parser.parse_args()

    header = (
        f"{'variant':<18} {'timing':<12} {'redeemed':>10} {'balance':>10} "
        f"{'extracted':>10} {'float':>6}"
    )
    print(header)
    print("-" * len(header))
    for name in sorted(VARIANTS):
        for timing in (SAME_CYCLE, CROSS_CYCLE):
            o = run_ddra(name, timing=timing, cycles=args.cycles,
                         purchase_minor=args.purchase)
            float_text = "-" if o.float_days is None else f"{o.float_days}d"
            print(
                f"{name:<18} {timing:<12} {format_usd(o.redeemed_minor):>10} "
                f"{format_usd(o.balance_minor):>10} "
                f"{format_usd(o.value_extracted):>10} {float_text:>6}"
            )


if __name__ == "__main__":
    main()
