"""The defensive reward engine: settlement crediting, proportional
clawback, the redemption gate, and statement-cycle reconciliation.

All four operations mutate a (UserLedger, records) pair for a single
user and emit events on the shared log.  They are pure state-machine
steps: same inputs, same outputs, no clocks and no randomness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ledger import (
    EngineConfig,
    EventLog,
    RewardRecord,
    Transaction,
    TransactionStatus,
    transition,
)
from .money import mul_fraction, rate_floor


class AlreadySettled(Exception):
    pass


class RefundExceedsAmount(Exception):
    pass


class NonPositiveRefund(Exception):
    pass


class NonPositiveAmount(Exception):
    pass


class RedeemDenied(Exception):
    def __init__(self, reason: str):
        super().__init__(f"redemption denied: {reason}")
        self.reason = reason


@dataclass
class RedeemDecision:
    allowed: bool
    reason: str  # "ok" | "grace-hold" | "insufficient-balance"


@dataclass
class ReconcileReport:
    period: int
    same_period_deductions: list = field(default_factory=list)  # (txn_id, deducted)
    late_clawbacks: list = field(default_factory=list)  # (txn_id, clawback)
    settled: list = field(default_factory=list)  # (txn_id, reward)
    hold_until: int | None = None


def reward_rate(category: str, config: EngineConfig):
    """Configured rate for a category; unknown categories earn nothing."""
    return config.rate(category)


def reward_on_settlement(
    ledger,
    records: dict,
    txn: Transaction,
    config: EngineConfig,
    log: EventLog,
    day: int,
    kind: str = "settle",
    amount_override: int | None = None,
    presettle_refunded: int = 0,
) -> int:
    """Credit the settlement reward for one transaction.

    ``amount_override`` is the refund-adjusted eligible amount when called
    from reconciliation; the transaction's own amount is never mutated.
    Returns the reward granted (0 when the rate or cap headroom is zero).
    """
    if txn.id in records:
        raise AlreadySettled(f"transaction {txn.id} already has a reward record")
    base = txn.amount if amount_override is None else amount_override
    if base <= 0:
        raise ValueError("settlement base must be positive")

    rate = config.rate(txn.category)
    used = ledger.used(txn.period, txn.category)
    r = rate_floor(rate, base)
    cap = config.cap(txn.category)
    if cap is not None:
        r = min(r, cap - used)
    if r > 0:
        ledger.balance += r
        ledger.monthly_used[(txn.period, txn.category)] = used + r
        log.emit(
            day=day,
            kind=kind,
            txn_id=txn.id,
            user=txn.user,
            amount_minor=r,
            category=txn.category,
            period=txn.period,
        )
    else:
        r = 0
    records[txn.id] = RewardRecord(
        reward_current=r,
        reward_original=r,
        total_refunded=presettle_refunded,
        claw_base=base,
    )
    if txn.status is TransactionStatus.PENDING:
        transition(txn, TransactionStatus.SETTLED)
    return r


def _clawback(
    ledger,
    record: RewardRecord,
    txn: Transaction,
    x: int,
    config: EngineConfig,
    log: EventLog,
    day: int,
    current_period: int,
    kind: str,
    floor_balance_at_zero: bool,
) -> int:
    """Shared clawback math for refunds and chargebacks.

    The clawback is telescoped against the cumulative refunded fraction
    so sequential partial refunds always sum to the exact proportional
    total; a full refund claws back the original reward to the cent.
    """
    presettle = txn.amount - record.claw_base
    prev = record.total_refunded - presettle  # refunds since settlement
    old_claw = mul_fraction(prev, record.claw_base, record.reward_original)
    new_claw = mul_fraction(prev + x, record.claw_base, record.reward_original)
    r_claw = new_claw - old_claw  # never negative: new_claw is monotone in x

    applied = r_claw
    if floor_balance_at_zero:
        # the zero-floor flaw: debt beyond the current balance is discarded
        applied = min(r_claw, max(ledger.balance, 0))
    if r_claw > 0:
        record.reward_current = max(0, record.reward_current - r_claw)
        if txn.period == current_period:
            used = ledger.used(txn.period, txn.category)
            ledger.monthly_used[(txn.period, txn.category)] = max(0, used - r_claw)
    if applied > 0:
        ledger.balance -= applied  # may go negative: the debt is the defense
        log.emit(
            day=day,
            kind=kind,
            txn_id=txn.id,
            user=txn.user,
            amount_minor=-applied,
            category=txn.category,
            period=txn.period,
        )
    record.total_refunded += x
    return applied


def reward_on_refund(
    ledger,
    records: dict,
    txn: Transaction,
    x: int,
    config: EngineConfig,
    log: EventLog,
    day: int,
    current_period: int,
    kind: str = "refund",
    floor_balance_at_zero: bool = False,
) -> int:
    """Apply proportional clawback for a refund of ``x`` minor units.

    Non-eligible statuses return 0 without mutation.  Cap headroom is
    restored only for same-period refunds; cross-cycle clawback operates
    purely through the balance.
    """
    if txn.status not in (TransactionStatus.SETTLED, TransactionStatus.PART_REF):
        return 0
    if x <= 0:
        raise NonPositiveRefund(f"refund amount must be positive, got {x}")
    record = records[txn.id]
    if record.total_refunded + x > txn.amount:
        raise RefundExceedsAmount(
            f"refund {x} exceeds remaining refundable amount on {txn.id}"
        )

    r_claw = _clawback(
        ledger, record, txn, x, config, log, day, current_period, kind,
        floor_balance_at_zero,
    )

    if record.total_refunded == txn.amount:
        if txn.status is TransactionStatus.SETTLED:
            transition(txn, TransactionStatus.PART_REF)
        transition(txn, TransactionStatus.REFUNDED)
    else:
        transition(txn, TransactionStatus.PART_REF)
    return r_claw


def reward_on_chargeback(
    ledger,
    records: dict,
    txn: Transaction,
    config: EngineConfig,
    log: EventLog,
    day: int,
    current_period: int,
    floor_balance_at_zero: bool = False,
) -> int:
    """Full-amount reversal from SETTLED, through the same clawback math."""
    if txn.status is not TransactionStatus.SETTLED:
        return 0
    record = records[txn.id]
    remaining = txn.amount - record.total_refunded
    r_claw = 0
    if remaining > 0:
        r_claw = _clawback(
            ledger, record, txn, remaining, config, log, day, current_period,
            "chargeback", floor_balance_at_zero,
        )
    transition(txn, TransactionStatus.CHARGEBACK)
    return r_claw


def can_redeem(ledger, y: int, today: int, config: EngineConfig) -> RedeemDecision:
    """Redemption gate: grace hold first, then the B_min floor."""
    if y <= 0:
        raise NonPositiveAmount(f"redemption amount must be positive, got {y}")
    hold = ledger.redemption_hold_until
    if hold is not None and today < hold:
        return RedeemDecision(allowed=False, reason="grace-hold")
    if ledger.balance - y < config.b_min:
        return RedeemDecision(allowed=False, reason="insufficient-balance")
    return RedeemDecision(allowed=True, reason="ok")


def redeem(
    ledger,
    y: int,
    today: int,
    config: EngineConfig,
    log: EventLog,
    user: str,
) -> None:
    """Execute an all-or-nothing redemption after the gate allows it."""
    decision = can_redeem(ledger, y, today, config)
    if not decision.allowed:
        raise RedeemDenied(decision.reason)
    ledger.balance -= y
    ledger.redeemed_total += y
    log.emit(
        day=today,
        kind="redeem",
        txn_id="",
        user=user,
        amount_minor=-y,
        category="",
        period=config.period_of_day(today),
    )


def statement_cycle_reconcile(
    ledger,
    records: dict,
    all_txns: dict,
    pending_refunds: dict,
    late_refunds: list,
    period: int,
    config: EngineConfig,
    log: EventLog,
    day: int,
    grace_days: int = 0,
    floor_balance_at_zero: bool = False,
) -> ReconcileReport:
    """Close period ``period`` in three phases.

    Phase 1 nets same-period pending refunds into each transaction's
    eligible amount (the original amount is preserved).  Phase 2 claws
    back late refunds against prior-period settled transactions.  Phase 3
    settles what is still PENDING on its eligible amount.  Finally the
    redemption hold is pushed out by ``grace_days``.
    """
    report = ReconcileReport(period=period)
    period_txns = [
        t for t in all_txns.values() if t.period == period
    ]

    for txn in period_txns:
        x = pending_refunds.get(txn.id, 0)
        txn.eligible = txn.amount - x
        if x > 0:
            report.same_period_deductions.append((txn.id, x))

    for txn_id, x in late_refunds:
        txn = all_txns[txn_id]
        if txn.status in (TransactionStatus.SETTLED, TransactionStatus.PART_REF):
            clawed = reward_on_refund(
                ledger, records, txn, x, config, log, day,
                current_period=period, kind="reconcile-clawback",
                floor_balance_at_zero=floor_balance_at_zero,
            )
            report.late_clawbacks.append((txn.id, clawed))

    for txn in period_txns:
        if txn.status is not TransactionStatus.PENDING:
            continue
        if txn.eligible > 0:
            r = reward_on_settlement(
                ledger, records, txn, config, log, day,
                kind="reconcile-settle",
                amount_override=txn.eligible,
                presettle_refunded=txn.amount - txn.eligible,
            )
            report.settled.append((txn.id, r))
        else:
            # fully refunded before settlement: cancel, no reward ever
            transition(txn, TransactionStatus.REFUNDED)
            records[txn.id] = RewardRecord(
                reward_current=0,
                reward_original=0,
                total_refunded=txn.amount,
                claw_base=txn.amount,
            )

    new_hold = day + grace_days
    if ledger.redemption_hold_until != new_hold:
        ledger.redemption_hold_until = new_hold
        if grace_days > 0:
            log.emit(
                day=day,
                kind="hold-set",
                txn_id="",
                user=next(iter(all_txns.values())).user if all_txns else "",
                amount_minor=0,
                category="",
                period=period,
            )
    report.hold_until = ledger.redemption_hold_until
    return report
