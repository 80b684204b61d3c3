"""Command-line front end.

Exit codes are part of the contract: 0 clean, 1 for input or IO
problems, 2 when a simulation or log fails an invariant (or an attack
extracts value), so the tool can gate CI pipelines.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .adversary import (
    ATTACK_CAP_MINOR,
    CONTROL,
    CROSS_CYCLE,
    SAME_CYCLE,
    DEFAULT_CYCLES,
    DEFAULT_PURCHASE_MINOR,
    run_battery,
    run_ddra,
)
from .harness import (
    Scenario,
    ScenarioInvalid,
    default_consistency_window,
    format_millions,
    leakage_estimate,
    run,
)
from .invariants import check_rrc, integrity_series
from .issuers import MATRIX_VARIANTS, comparison_matrix, render_matrix
from .ledger import ConfigError, EngineConfig, EventLog, ParseError, SequenceGap
from .money import format_usd

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VIOLATION = 2


def _load_config(path) -> EngineConfig:
    with open(path) as fh:
        return EngineConfig.from_json_dict(json.load(fh))


def cmd_simulate(args) -> int:
    scenario = Scenario.load(args.scenario)
    report = run(scenario)
    if args.log_out:
        report.log.write_jsonl(args.log_out)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report.to_json_dict(), fh, indent=2)
            fh.write("\n")
    if args.format == "json":
        print(json.dumps(report.to_json_dict(), indent=2))
    else:
        print(f"scenario: {report.label}")
        print(f"variant: {scenario.config.variant}")
        print(f"events logged: {len(report.log)}")
        print(f"net spend: {format_usd(report.net_spend)}")
        print(f"balance: {format_usd(report.ledger.balance)}")
        print(f"redeemed: {format_usd(report.ledger.redeemed_total)}")
        print(f"net reward: {format_usd(report.net_reward)}")
        bad = [s for s in report.snapshots if not s.ok]
        for s in bad:
            print(
                f"INTEGRITY VIOLATION day {s.day}: net reward "
                f"{format_usd(s.net_reward)} exceeds bound {format_usd(s.bound)}"
            )
        stale = [v for v in report.rrc if not v.ok]
        for v in stale:
            where = "never" if v.restored_day is None else f"day {v.restored_day}"
            print(
                f"CONSISTENCY VIOLATION txn {v.txn_id}: refund on day "
                f"{v.refund_day} restored {where}"
            )
        if not bad and not stale:
            print("invariants: ok")
    if any(not s.ok for s in report.snapshots) or any(not v.ok for v in report.rrc):
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_attack(args) -> int:
    outcome = run_ddra(
        args.issuer,
        timing=args.timing,
        purchase_minor=args.purchase,
        cycles=args.cycles,
    )
    print(f"issuer: {outcome.variant}  strategy: {args.strategy}  "
          f"timing: {outcome.timing}")
    print(f"cycles: {outcome.cycles}  purchase: {format_usd(outcome.purchase_minor)}")
    print(f"final net spend: {format_usd(outcome.net_spend_final)}")
    print(f"redeemed: {format_usd(outcome.redeemed_minor)}  "
          f"balance: {format_usd(outcome.balance_minor)}")
    print(f"value extracted: {format_usd(outcome.value_extracted)}")
    if outcome.value_extracted > 0:
        print("RESULT: attack succeeds, value survives quiescence")
        return EXIT_VIOLATION
    lags = [l for l in outcome.refund_clawback_lags if l is not None and l > 0]
    if lags:
        print(
            f"WARNING: clawback lags refunds by up to {max(lags)} days "
            "(float window, fully recovered by quiescence)"
        )
    else:
        print("RESULT: no value extracted")
    return EXIT_OK


def cmd_matrix(args) -> int:
    battery = {name: run_battery(name) for name in MATRIX_VARIANTS + ["V3a"]}
    rows = comparison_matrix(battery)
    if args.format == "json":
        print(json.dumps(rows, indent=2, ensure_ascii=False))
    else:
        sys.stdout.write(render_matrix(rows))
    return EXIT_OK


def cmd_check(args) -> int:
    log = EventLog.read_jsonl(args.log)
    config = _load_config(args.config)
    delta = args.delta_days
    if delta is None:
        delta = default_consistency_window(config)
    snapshots = integrity_series(log, config)
    verdicts = check_rrc(log, delta, config)
    ok = True
    for s in snapshots:
        if not s.ok:
            ok = False
            print(
                f"INTEGRITY VIOLATION day {s.day}: net reward "
                f"{format_usd(s.net_reward)} exceeds bound {format_usd(s.bound)}"
            )
    for v in verdicts:
        if not v.ok:
            ok = False
            where = "never" if v.restored_day is None else f"day {v.restored_day}"
            print(
                f"CONSISTENCY VIOLATION txn {v.txn_id}: refund on day "
                f"{v.refund_day} restored {where} (allowed lag {delta}d)"
            )
    if ok:
        print(f"checked {len(log)} events: invariants hold (allowed lag {delta}d)")
        return EXIT_OK
    return EXIT_VIOLATION


def cmd_impact(args) -> int:
    if args.table:
        rates = [Fraction(1, 1000), Fraction(1, 100), Fraction(5, 100)]
        cohorts = [100_000, 1_000_000, 10_000_000]
        cap = args.cap
        header = "abusers".ljust(10) + "".join(f"{u:>14,}" for u in cohorts)
        print(header)
        for p in rates:
            cells = [
                format_millions(leakage_estimate(p, u, cap)) for u in cohorts
            ]
            pct = format(Fraction(p * 100).numerator / Fraction(p * 100).denominator, "g")
            print(f"{pct + '%':<10}" + "".join(f"{c:>14}" for c in cells))
        print(f"(annual loss, $M, monthly cap {format_usd(cap)} per user)")
        return EXIT_OK
    loss = leakage_estimate(Fraction(args.p), args.users, args.cap)
    print(
        f"annual loss: {format_usd(int(loss))} "
        f"({format_millions(loss)} $M) at abuse rate {args.p}, "
        f"{args.users:,} users, cap {format_usd(args.cap)}"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rewardsim",
        description="Cashback reward-engine simulator and integrity checker.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a scenario file and check invariants")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", help="write the full JSON report here")
    p.add_argument("--log-out", help="write the event log (JSONL) here")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("attack", help="run the refund double-dip against a variant")
    p.add_argument("--issuer", required=True)
    p.add_argument("--strategy", choices=["ddra"], default="ddra")
    p.add_argument("--timing", choices=[SAME_CYCLE, CROSS_CYCLE, CONTROL],
                   default=SAME_CYCLE)
    p.add_argument("--purchase", type=int, default=DEFAULT_PURCHASE_MINOR,
                   help="purchase size in minor units")
    p.add_argument("--cycles", type=int, default=DEFAULT_CYCLES)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("matrix", help="score all issuer variants and print the matrix")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("check", help="verify invariants over a stored event log")
    p.add_argument("--log", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--delta-days", type=int, default=None,
                   help="allowed refund-to-restoration lag (default per variant)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("impact", help="annual loss estimate for abuse at scale")
    p.add_argument("--p", default="0.01", help="abuser share, e.g. 0.01 or 1/100")
    p.add_argument("--users", type=int, default=1_000_000)
    p.add_argument("--cap", type=int, default=ATTACK_CAP_MINOR,
                   help="monthly reward cap in minor units")
    p.add_argument("--table", action="store_true",
                   help="print the full rate-by-cohort grid")
    p.set_defaults(func=cmd_impact)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError, ParseError, SequenceGap,
            ScenarioInvalid, ConfigError, KeyError, ValueError,
            ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
