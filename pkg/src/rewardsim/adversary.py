"""The double-dip refund attack and the standard evaluation battery.

The attack repeats a four-step loop against an issuer variant: buy in a
rewarded category, collect the reward, redeem it as soon as the gate
allows, then refund the purchase.  Whether any value survives to
quiescence, and how long clawback lags behind the refund, are the two
numbers the comparison matrix is built from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .harness import Scenario, ScenarioEvent, SimulationReport, run
from .invariants import CLAW_KINDS, GRANT_KINDS, net_reward_from_log, oracle_bound
from .ledger import EngineConfig

SAME_CYCLE = "same-cycle"
CROSS_CYCLE = "cross-cycle"
CONTROL = "control"

ATTACK_CATEGORY = "GROCERY"
ATTACK_RATE = Fraction(5, 100)
ATTACK_CAP_MINOR = 50_00
DEFAULT_PURCHASE_MINOR = 100_00
DEFAULT_CYCLES = 12


@dataclass
class AttackOutcome:
    variant: str
    timing: str
    purchase_minor: int
    cycles: int
    refund_fraction: Fraction
    net_spend_final: int
    net_reward_final: int
    redeemed_minor: int
    balance_minor: int
    value_extracted: int
    float_days: int | None  # None: clawback never posted
    refund_clawback_lags: list = field(default_factory=list)
    report: SimulationReport | None = None


def attack_config(variant: str, period_length_days: int = 30) -> EngineConfig:
    return EngineConfig(
        reward_rate={ATTACK_CATEGORY: ATTACK_RATE},
        monthly_cap={ATTACK_CATEGORY: ATTACK_CAP_MINOR},
        b_min=0,
        grace_days=7,
        period_length_days=period_length_days,
        variant=variant,
    )


def build_ddra_scenario(
    variant: str,
    timing: str = SAME_CYCLE,
    purchase_minor: int = DEFAULT_PURCHASE_MINOR,
    cycles: int = DEFAULT_CYCLES,
    refund_fraction: Fraction = Fraction(1),
) -> Scenario:
    """One purchase-and-refund pair per billing cycle.

    Same-cycle refunds land mid-cycle, before the statement closes.
    Cross-cycle refunds land early in the following cycle, after any
    close-time settlement has already credited the reward.
    """
    config = attack_config(variant)
    length = config.period_length_days
    events = []
    for k in range(cycles):
        txn_id = f"t{k:03d}"
        if timing == SAME_CYCLE:
            p_day, r_day = k * length + 2, k * length + 12
        elif timing == CROSS_CYCLE:
            p_day, r_day = k * length + 20, (k + 1) * length + 5
        elif timing == CONTROL:
            p_day, r_day = k * length + 2, None
        else:
            raise ValueError(f"unknown attack timing {timing!r}")
        events.append(
            ScenarioEvent(
                day=p_day, kind="purchase", txn_id=txn_id,
                amount_minor=purchase_minor, category=ATTACK_CATEGORY,
            )
        )
        if r_day is not None:
            x = int(refund_fraction * purchase_minor)
            events.append(
                ScenarioEvent(day=r_day, kind="refund", txn_id=txn_id, amount_minor=x)
            )
    return Scenario(
        label=f"ddra-{variant}-{timing}",
        config=config,
        events=events,
        auto_redeem=True,
        user="attacker",
    )


def _refund_clawback_lags(report: SimulationReport) -> list:
    """Per rewarded-then-refunded transaction, days from refund to clawback."""
    granted: dict[str, int] = {}
    lags = []
    for i, ev in enumerate(report.log):
        if ev.kind in GRANT_KINDS:
            granted[ev.txn_id] = granted.get(ev.txn_id, 0) + ev.amount_minor
        elif ev.kind in ("refund-posted", "chargeback-posted"):
            if granted.get(ev.txn_id, 0) <= 0:
                continue
            claw_day = next(
                (
                    later.day
                    for later in report.log.events[i + 1:]
                    if later.kind in CLAW_KINDS and later.txn_id == ev.txn_id
                ),
                None,
            )
            lags.append(None if claw_day is None else claw_day - ev.day)
    return lags


def _float_days(report: SimulationReport) -> int | None:
    claw_days = [ev.day for ev in report.log if ev.kind in CLAW_KINDS]
    if not claw_days:
        return None
    redeem_days = [ev.day for ev in report.log if ev.kind == "redeem"]
    if redeem_days and redeem_days[0] < claw_days[0]:
        return claw_days[0] - redeem_days[0]
    return 0


def run_ddra(
    variant: str,
    timing: str = SAME_CYCLE,
    purchase_minor: int = DEFAULT_PURCHASE_MINOR,
    cycles: int = DEFAULT_CYCLES,
    refund_fraction: Fraction = Fraction(1),
) -> AttackOutcome:
    """Run the attack to quiescence and measure what survives."""
    scenario = build_ddra_scenario(
        variant, timing=timing, purchase_minor=purchase_minor,
        cycles=cycles, refund_fraction=refund_fraction,
    )
    report = run(scenario, daily_snapshots=False)
    reward = net_reward_from_log(report.log)
    bound = oracle_bound(report.log, scenario.config)
    return AttackOutcome(
        variant=variant,
        timing=timing,
        purchase_minor=purchase_minor,
        cycles=cycles,
        refund_fraction=refund_fraction,
        net_spend_final=report.net_spend,
        net_reward_final=reward,
        redeemed_minor=report.ledger.redeemed_total,
        balance_minor=report.ledger.balance,
        value_extracted=max(0, reward - bound),
        float_days=_float_days(report),
        refund_clawback_lags=_refund_clawback_lags(report),
        report=report,
    )


def run_battery(variant: str, cycles: int = DEFAULT_CYCLES) -> list:
    """The fixed four-scenario battery the comparison matrix is scored on."""
    return [
        run_ddra(variant, timing=SAME_CYCLE, cycles=cycles),
        run_ddra(variant, timing=CROSS_CYCLE, cycles=cycles),
        run_ddra(variant, timing=CROSS_CYCLE, cycles=cycles,
                 refund_fraction=Fraction(1, 2)),
        run_ddra(variant, timing=CONTROL, cycles=cycles),
    ]
