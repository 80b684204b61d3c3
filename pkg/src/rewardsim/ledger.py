"""Core ledger state: transactions, reward records, the user ledger,
the append-only event log, and engine configuration.

Every value that represents money is an int in minor units.  The event
log is the audit trail: replaying it through the same configuration
reproduces ledger state bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction


class TransactionStatus(Enum):
    PENDING = "PENDING"
    SETTLED = "SETTLED"
    PART_REF = "PART_REF"
    REFUNDED = "REFUNDED"
    CHARGEBACK = "CHARGEBACK"


# Legal edges of the transaction lifecycle.  Everything else is rejected,
# including SETTLED -> SETTLED.
LEGAL_TRANSITIONS = frozenset(
    {
        (TransactionStatus.PENDING, TransactionStatus.SETTLED),
        (TransactionStatus.PENDING, TransactionStatus.REFUNDED),  # cancel
        (TransactionStatus.SETTLED, TransactionStatus.PART_REF),
        (TransactionStatus.SETTLED, TransactionStatus.CHARGEBACK),
        (TransactionStatus.PART_REF, TransactionStatus.PART_REF),
        (TransactionStatus.PART_REF, TransactionStatus.REFUNDED),
    }
)


class IllegalTransition(Exception):
    def __init__(self, src: TransactionStatus, dst: TransactionStatus):
        super().__init__(f"illegal status transition {src.value} -> {dst.value}")
        self.src = src
        self.dst = dst


class SequenceGap(Exception):
    """Event appended out of sequence."""


class ParseError(Exception):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass
class Transaction:
    id: str
    user: str
    merchant: str
    amount: int  # minor units, > 0
    category: str
    period: int  # billing-period index of the purchase
    status: TransactionStatus = TransactionStatus.PENDING
    eligible: int = 0  # reconciliation-local scratch, never the new amount

    def __post_init__(self):
        if self.amount <= 0:
            raise ValueError(f"transaction amount must be positive, got {self.amount}")


def transition(txn: Transaction, target: TransactionStatus) -> Transaction:
    """Apply one legal lifecycle edge.  Status only, no ledger effects."""
    if (txn.status, target) not in LEGAL_TRANSITIONS:
        raise IllegalTransition(txn.status, target)
    txn.status = target
    return txn


@dataclass
class RewardRecord:
    """Per-transaction reward state.  Persists for the account lifetime.

    ``reward_original`` is write-once at settlement.  ``claw_base`` is the
    amount the settlement reward was computed against (the refund-adjusted
    eligible amount when settled by reconciliation), and is the divisor for
    proportional clawback.  ``total_refunded`` counts all principal refunds
    including any netted out before settlement.
    """

    reward_current: int
    reward_original: int
    total_refunded: int
    claw_base: int

    def clawed_so_far(self) -> int:
        return self.reward_original - self.reward_current


@dataclass
class UserLedger:
    balance: int = 0  # may go negative via clawback only
    redeemed_total: int = 0
    monthly_used: dict = field(default_factory=dict)  # (period, category) -> int
    redemption_hold_until: int | None = None  # day index

    def used(self, period: int, category: str) -> int:
        return self.monthly_used.get((period, category), 0)


EVENT_KINDS = frozenset(
    {
        # reward-layer events (each matches exactly one balance mutation,
        # except hold-set which carries no delta)
        "settle",
        "refund",
        "chargeback",
        "redeem",
        "reconcile-settle",
        "reconcile-clawback",
        "hold-set",
        # principal/intent events, consumed by replay
        "purchase",
        "refund-posted",
        "chargeback-posted",
        "redeem-request",
    }
)

REWARD_DELTA_KINDS = frozenset(
    {"settle", "refund", "chargeback", "redeem", "reconcile-settle", "reconcile-clawback"}
)

CLAWBACK_KINDS = frozenset({"refund", "chargeback", "reconcile-clawback"})


@dataclass(frozen=True)
class RewardEvent:
    seq: int
    day: int
    kind: str
    txn_id: str
    user: str
    amount_minor: int
    category: str
    period: int

    def to_json_line(self) -> str:
        # field order is part of the wire format
        return json.dumps(
            {
                "seq": self.seq,
                "day": self.day,
                "kind": self.kind,
                "txn_id": self.txn_id,
                "user": self.user,
                "amount_minor": self.amount_minor,
                "category": self.category,
                "period": self.period,
            }
        )


class EventLog:
    """Append-only, contiguously sequenced event log."""

    def __init__(self):
        self.events: list[RewardEvent] = []

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    @property
    def last_seq(self) -> int:
        return self.events[-1].seq if self.events else 0

    def append(self, event: RewardEvent) -> None:
        if event.seq != self.last_seq + 1:
            raise SequenceGap(
                f"expected seq {self.last_seq + 1}, got {event.seq}"
            )
        if event.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {event.kind!r}")
        self.events.append(event)

    def emit(
        self,
        day: int,
        kind: str,
        txn_id: str,
        user: str,
        amount_minor: int,
        category: str = "",
        period: int = 0,
    ) -> RewardEvent:
        ev = RewardEvent(
            seq=self.last_seq + 1,
            day=day,
            kind=kind,
            txn_id=txn_id,
            user=user,
            amount_minor=amount_minor,
            category=category,
            period=period,
        )
        self.append(ev)
        return ev

    def write_jsonl(self, path) -> None:
        with open(path, "w") as fh:
            for ev in self.events:
                fh.write(ev.to_json_line() + "\n")

    @classmethod
    def read_jsonl(cls, path) -> "EventLog":
        log = cls()
        with open(path) as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    raw = json.loads(line)
                    ev = RewardEvent(
                        seq=raw["seq"],
                        day=raw["day"],
                        kind=raw["kind"],
                        txn_id=raw["txn_id"],
                        user=raw["user"],
                        amount_minor=raw["amount_minor"],
                        category=raw["category"],
                        period=raw["period"],
                    )
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise ParseError(line_no, str(exc)) from exc
                if any(not isinstance(getattr(ev, f), int) for f in
                       ("seq", "day", "amount_minor", "period")):
                    raise ParseError(line_no, "integer field holds a non-integer")
                log.append(ev)
        return log


def append_event(log: EventLog, event: RewardEvent) -> None:
    log.append(event)


class ConfigError(Exception):
    pass


@dataclass
class EngineConfig:
    """Program rules plus the issuer-variant selector.

    ``reward_rate`` maps category to a Fraction in [0, 1]; the key "*"
    acts as a flat-rate fallback.  ``monthly_cap`` maps category to minor
    units ("*" fallback again); an absent category is uncapped.
    """

    reward_rate: dict = field(default_factory=dict)
    monthly_cap: dict = field(default_factory=dict)
    b_min: int = 0
    grace_days: int = 7
    period_length_days: int = 30
    variant: str = "defensive-instant"
    delivery_delay_days: int = 0

    def __post_init__(self):
        for cat, rate in self.reward_rate.items():
            if not 0 <= rate <= 1:
                raise ConfigError(f"rate for {cat!r} outside [0,1]: {rate}")
        for cat, cap in self.monthly_cap.items():
            if cap < 0:
                raise ConfigError(f"cap for {cat!r} negative: {cap}")
        if self.period_length_days <= 0:
            raise ConfigError("period_length_days must be positive")
        if not 0 <= self.grace_days < self.period_length_days:
            raise ConfigError("grace_days must be in [0, period_length_days)")
        if self.delivery_delay_days < 0:
            raise ConfigError("delivery_delay_days must be >= 0")

    def rate(self, category: str) -> Fraction:
        if category in self.reward_rate:
            return self.reward_rate[category]
        return self.reward_rate.get("*", Fraction(0))

    def cap(self, category: str) -> int | None:
        if category in self.monthly_cap:
            return self.monthly_cap[category]
        return self.monthly_cap.get("*")

    def period_of_day(self, day: int) -> int:
        return day // self.period_length_days

    def close_day(self, period: int) -> int:
        """Day on which period ``period`` closes (start of the next one)."""
        return (period + 1) * self.period_length_days

    # JSON uses basis points for rates so files stay float-free.
    def to_json_dict(self) -> dict:
        return {
            "variant": self.variant,
            "reward_rate_bps": {
                c: int(r * 10000) for c, r in sorted(self.reward_rate.items())
            },
            "monthly_cap_minor": dict(sorted(self.monthly_cap.items())),
            "b_min_minor": self.b_min,
            "grace_days": self.grace_days,
            "period_length_days": self.period_length_days,
            "delivery_delay_days": self.delivery_delay_days,
        }

    @classmethod
    def from_json_dict(cls, raw: dict) -> "EngineConfig":
        rates = {
            c: Fraction(bps, 10000)
            for c, bps in raw.get("reward_rate_bps", {}).items()
        }
        return cls(
            reward_rate=rates,
            monthly_cap=dict(raw.get("monthly_cap_minor", {})),
            b_min=raw.get("b_min_minor", 0),
            grace_days=raw.get("grace_days", 7),
            period_length_days=raw.get("period_length_days", 30),
            variant=raw.get("variant", "defensive-instant"),
            delivery_delay_days=raw.get("delivery_delay_days", 0),
        )
