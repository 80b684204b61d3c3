"""Scenario model, deterministic day-driven simulation, and log replay.

A scenario is a labelled list of (day, kind, ...) intents plus an engine
configuration.  The simulation walks days in order: statement closes
fire at the start of their day, then the day's intents in input order,
then the optional sweep-everything redemption policy.  Every intent is
logged before its effects, so the log alone reconstructs the run:
``replay`` re-executes the intent events and must reproduce the log
byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction

from . import engine
from .invariants import check_rrc, integrity_series, net_reward, net_spend
from .issuers import (
    ADJ_IMMEDIATE,
    ADJ_NONE,
    ADJ_SAME_CYCLE_ONLY,
    ADJ_STATEMENT_CLOSE,
    INSTANT,
    NEG_ZERO_FLOORED,
    IssuerVariant,
    get_variant,
)
from .ledger import (
    EngineConfig,
    EventLog,
    RewardRecord,
    Transaction,
    TransactionStatus,
    UserLedger,
    transition,
)

SCENARIO_KINDS = ("purchase", "refund", "chargeback", "redeem-request")


class ScenarioInvalid(Exception):
    pass


@dataclass
class ScenarioEvent:
    day: int
    kind: str
    txn_id: str = ""
    amount_minor: int = 0
    category: str = ""


@dataclass
class Scenario:
    label: str
    config: EngineConfig
    events: list = field(default_factory=list)
    auto_redeem: bool = False
    user: str = "u1"

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "label": self.label,
            "config": self.config.to_json_dict(),
            "auto_redeem": self.auto_redeem,
            "user": self.user,
            "events": [
                {
                    "day": e.day,
                    "kind": e.kind,
                    "txn_id": e.txn_id,
                    "amount_minor": e.amount_minor,
                    "category": e.category,
                }
                for e in self.events
            ],
        }

    @classmethod
    def from_json_dict(cls, raw: dict) -> "Scenario":
        if raw.get("schema") != 1:
            raise ScenarioInvalid(f"unsupported scenario schema: {raw.get('schema')!r}")
        try:
            events = [
                ScenarioEvent(
                    day=e["day"],
                    kind=e["kind"],
                    txn_id=e.get("txn_id", ""),
                    amount_minor=e.get("amount_minor", 0),
                    category=e.get("category", ""),
                )
                for e in raw.get("events", [])
            ]
            return cls(
                label=raw["label"],
                config=EngineConfig.from_json_dict(raw["config"]),
                events=events,
                auto_redeem=raw.get("auto_redeem", False),
                user=raw.get("user", "u1"),
            )
        except (KeyError, TypeError) as exc:
            raise ScenarioInvalid(str(exc)) from exc

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Scenario":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


@dataclass
class SimulationReport:
    label: str
    config: EngineConfig
    ledger: UserLedger
    log: EventLog
    final_day: int
    snapshots: list = field(default_factory=list)
    rrc: list = field(default_factory=list)

    @property
    def net_reward(self) -> int:
        return net_reward(self.ledger)

    @property
    def net_spend(self) -> int:
        return net_spend(self.log)

    @property
    def integrity_ok(self) -> bool:
        return all(s.ok for s in self.snapshots)

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "label": self.label,
            "config": self.config.to_json_dict(),
            "final_day": self.final_day,
            "final": {
                "balance_minor": self.ledger.balance,
                "redeemed_minor": self.ledger.redeemed_total,
                "net_reward_minor": self.net_reward,
                "net_spend_minor": self.net_spend,
            },
            "integrity": [
                {"day": s.day, "net_reward": s.net_reward, "bound": s.bound, "ok": s.ok}
                for s in self.snapshots
            ],
            "consistency": [
                {
                    "txn_id": v.txn_id,
                    "refund_day": v.refund_day,
                    "restored_day": v.restored_day,
                    "ok": v.ok,
                }
                for v in self.rrc
            ],
            "events": [json.loads(ev.to_json_line()) for ev in self.log],
        }


def default_consistency_window(config: EngineConfig) -> int:
    """Days a variant is allowed to lag behind a refund.

    Immediate-adjustment variants must re-align the same day; everything
    else gets one full statement period.
    """
    variant = get_variant(config.variant)
    return 0 if variant.refund_adjustment == ADJ_IMMEDIATE else config.period_length_days


class Simulation:
    """Single-user, day-driven run of one scenario under one variant."""

    def __init__(self, config: EngineConfig, user: str = "u1"):
        self.config = config
        self.variant: IssuerVariant = get_variant(config.variant)
        self.user = user
        self.ledger = UserLedger()
        self.records: dict[str, RewardRecord] = {}
        self.txns: dict[str, Transaction] = {}
        self.pending_refunds: dict[str, int] = {}
        self.late_refunds: list = []
        self.log = EventLog()
        self.last_intent_day: int | None = None
        self._due_settlements: list = []  # (due_day, txn_id)

    def _note_intent(self, day: int) -> None:
        if self.last_intent_day is None or day > self.last_intent_day:
            self.last_intent_day = day

    # -- intent handlers ------------------------------------------------

    def _refunded_principal(self, txn: Transaction) -> int:
        if txn.id in self.records:
            return self.records[txn.id].total_refunded
        return self.pending_refunds.get(txn.id, 0)

    def _require_txn(self, txn_id: str) -> Transaction:
        try:
            return self.txns[txn_id]
        except KeyError:
            raise ScenarioInvalid(f"unknown transaction {txn_id!r}") from None

    def purchase(self, day: int, txn_id: str, amount: int, category: str) -> None:
        if txn_id in self.txns:
            raise ScenarioInvalid(f"duplicate transaction id {txn_id!r}")
        if amount <= 0:
            raise ScenarioInvalid(f"purchase amount must be positive, got {amount}")
        period = self.config.period_of_day(day)
        txn = Transaction(
            id=txn_id, user=self.user, merchant="m", amount=amount,
            category=category, period=period,
        )
        self.txns[txn_id] = txn
        self._note_intent(day)
        self.log.emit(
            day=day, kind="purchase", txn_id=txn_id, user=self.user,
            amount_minor=amount, category=category, period=period,
        )
        if self.variant.reward_timing == INSTANT:
            due = day + self.config.delivery_delay_days
            if due == day:
                self._settle_instant(day, txn)
            else:
                self._due_settlements.append((due, txn_id))

    def _settle_instant(self, day: int, txn: Transaction) -> None:
        # refunds can land before a delayed settlement; net them out first
        x = self.pending_refunds.pop(txn.id, 0)
        if x >= txn.amount:
            transition(txn, TransactionStatus.REFUNDED)
            self.records[txn.id] = RewardRecord(
                reward_current=0, reward_original=0,
                total_refunded=txn.amount, claw_base=txn.amount,
            )
            return
        engine.reward_on_settlement(
            self.ledger, self.records, txn, self.config, self.log, day,
            amount_override=None if x == 0 else txn.amount - x,
            presettle_refunded=x,
        )

    def refund(self, day: int, txn_id: str, x: int) -> None:
        txn = self._require_txn(txn_id)
        if x <= 0:
            raise ScenarioInvalid(f"refund amount must be positive, got {x}")
        deferred = sum(amt for tid, amt in self.late_refunds if tid == txn_id)
        if self._refunded_principal(txn) + deferred + x > txn.amount:
            raise ScenarioInvalid(
                f"refund {x} exceeds remaining principal on {txn_id!r}"
            )
        self._note_intent(day)
        self.log.emit(
            day=day, kind="refund-posted", txn_id=txn_id, user=self.user,
            amount_minor=-x, category=txn.category, period=txn.period,
        )
        if txn.status is TransactionStatus.PENDING:
            self.pending_refunds[txn_id] = self.pending_refunds.get(txn_id, 0) + x
            return
        adjustment = self.variant.refund_adjustment
        if adjustment in (ADJ_NONE, ADJ_SAME_CYCLE_ONLY):
            # settled means prior-cycle for same-cycle-only variants, so
            # both paths keep the reward and move principal state only
            self._principal_only_refund(txn, x)
        elif adjustment == ADJ_IMMEDIATE:
            engine.reward_on_refund(
                self.ledger, self.records, txn, x, self.config, self.log, day,
                current_period=self.config.period_of_day(day),
                floor_balance_at_zero=self._floors_at_zero,
            )
        elif adjustment == ADJ_STATEMENT_CLOSE:
            self.late_refunds.append((txn_id, x))
        else:
            raise ScenarioInvalid(f"unhandled refund adjustment {adjustment!r}")

    def _principal_only_refund(self, txn: Transaction, x: int) -> None:
        record = self.records[txn.id]
        record.total_refunded += x
        if txn.status is TransactionStatus.SETTLED:
            transition(txn, TransactionStatus.PART_REF)
        if record.total_refunded == txn.amount:
            transition(txn, TransactionStatus.REFUNDED)

    def chargeback(self, day: int, txn_id: str) -> None:
        txn = self._require_txn(txn_id)
        if txn.status is not TransactionStatus.SETTLED:
            raise ScenarioInvalid(
                f"chargeback requires a settled transaction, {txn_id!r} is "
                f"{txn.status.value}"
            )
        remaining = txn.amount - self._refunded_principal(txn)
        self._note_intent(day)
        self.log.emit(
            day=day, kind="chargeback-posted", txn_id=txn_id, user=self.user,
            amount_minor=-remaining, category=txn.category, period=txn.period,
        )
        if self.variant.refund_adjustment in (ADJ_NONE, ADJ_SAME_CYCLE_ONLY):
            record = self.records[txn_id]
            record.total_refunded += remaining
            transition(txn, TransactionStatus.CHARGEBACK)
        else:
            # forced reversals never wait for the cycle close
            engine.reward_on_chargeback(
                self.ledger, self.records, txn, self.config, self.log, day,
                current_period=self.config.period_of_day(day),
                floor_balance_at_zero=self._floors_at_zero,
            )

    def redeem_request(self, day: int, y: int) -> bool:
        if y <= 0:
            raise ScenarioInvalid(f"redemption amount must be positive, got {y}")
        self._note_intent(day)
        self.log.emit(
            day=day, kind="redeem-request", txn_id="", user=self.user,
            amount_minor=-y, category="",
            period=self.config.period_of_day(day),
        )
        decision = engine.can_redeem(self.ledger, y, day, self.config)
        if decision.allowed:
            engine.redeem(self.ledger, y, day, self.config, self.log, self.user)
        return decision.allowed

    # -- clock ----------------------------------------------------------

    @property
    def _floors_at_zero(self) -> bool:
        return self.variant.negative_balance == NEG_ZERO_FLOORED

    def close_period(self, period: int) -> None:
        day = self.config.close_day(period)
        grace = self.config.grace_days if self.variant.uses_grace_hold else 0
        late, self.late_refunds = self.late_refunds, []
        engine.statement_cycle_reconcile(
            self.ledger, self.records, self.txns, self.pending_refunds, late,
            period, self.config, self.log, day,
            grace_days=grace, floor_balance_at_zero=self._floors_at_zero,
        )
        if self.variant.auto_redeem_at_close and self.ledger.balance > 0:
            y = self.ledger.balance
            if engine.can_redeem(self.ledger, y, day, self.config).allowed:
                engine.redeem(self.ledger, y, day, self.config, self.log, self.user)

    def _sweep_policy(self, day: int) -> None:
        y = self.ledger.balance
        if y > 0 and engine.can_redeem(self.ledger, y, day, self.config).allowed:
            self.redeem_request(day, y)


def run(scenario: Scenario, daily_snapshots: bool = True) -> SimulationReport:
    """Execute a scenario to quiescence.

    The horizon runs one full period past the period of the last intent,
    so every deferred settlement, clawback, and hold has resolved when
    the report is produced.  An empty scenario produces an empty log.
    """
    sim = Simulation(scenario.config, user=scenario.user)
    config = scenario.config
    events = sorted(scenario.events, key=lambda e: e.day)
    for ev in events:
        if ev.kind not in SCENARIO_KINDS:
            raise ScenarioInvalid(f"unknown scenario event kind {ev.kind!r}")
        if ev.day < 0:
            raise ScenarioInvalid(f"negative day {ev.day}")

    def horizon(last_intent_day: int) -> int:
        return config.close_day(config.period_of_day(last_intent_day) + 1)

    final_day = horizon(events[-1].day) if events else -1

    by_day: dict[int, list] = {}
    for ev in events:
        by_day.setdefault(ev.day, []).append(ev)

    day = 0
    while day <= final_day:
        if day > 0 and day % config.period_length_days == 0:
            sim.close_period(day // config.period_length_days - 1)
        while sim._due_settlements and sim._due_settlements[0][0] <= day:
            _, txn_id = sim._due_settlements.pop(0)
            txn = sim.txns[txn_id]
            if txn.status is TransactionStatus.PENDING:
                sim._settle_instant(day, txn)
        for ev in by_day.get(day, []):
            if ev.kind == "purchase":
                sim.purchase(day, ev.txn_id, ev.amount_minor, ev.category)
            elif ev.kind == "refund":
                sim.refund(day, ev.txn_id, ev.amount_minor)
            elif ev.kind == "chargeback":
                sim.chargeback(day, ev.txn_id)
            elif ev.kind == "redeem-request":
                sim.redeem_request(day, ev.amount_minor)
        if scenario.auto_redeem:
            sim._sweep_policy(day)
        # policy sweeps append intents mid-run; the horizon must cover
        # them the same way it covers scenario intents, or replays of
        # the log would run a different number of closes
        if sim.last_intent_day is not None:
            final_day = max(final_day, horizon(sim.last_intent_day))
        day += 1

    report = SimulationReport(
        label=scenario.label,
        config=config,
        ledger=sim.ledger,
        log=sim.log,
        final_day=max(final_day, 0),
    )
    if daily_snapshots:
        report.snapshots = integrity_series(sim.log, config)
        report.rrc = check_rrc(sim.log, default_consistency_window(config), config)
    return report


INTENT_KINDS = frozenset({"purchase", "refund-posted", "chargeback-posted", "redeem-request"})

_INTENT_TO_SCENARIO = {
    "purchase": "purchase",
    "refund-posted": "refund",
    "chargeback-posted": "chargeback",
    "redeem-request": "redeem-request",
}


def scenario_from_log(log: EventLog, config: EngineConfig, label: str,
                      user: str = "u1") -> Scenario:
    """Rebuild the intent stream of a log as a runnable scenario.

    Reward-layer events are dropped: re-running the intents regenerates
    them.  Policy-driven sweeps appear in the log as redeem-request
    intents, so the rebuilt scenario never enables the sweep policy.
    """
    events = []
    for ev in log:
        if ev.kind not in INTENT_KINDS:
            continue
        events.append(
            ScenarioEvent(
                day=ev.day,
                kind=_INTENT_TO_SCENARIO[ev.kind],
                txn_id=ev.txn_id,
                amount_minor=abs(ev.amount_minor),
                category=ev.category,
            )
        )
        if ev.user:
            user = ev.user
    return Scenario(label=label, config=config, events=events,
                    auto_redeem=False, user=user)


def replay(log_path, config: EngineConfig, label: str = "replay") -> SimulationReport:
    """Re-run the intents of a stored log; the result must match it."""
    log = EventLog.read_jsonl(log_path)
    scenario = scenario_from_log(log, config, label)
    return run(scenario, daily_snapshots=False)


# -- fleet-level loss estimation ---------------------------------------


def leakage_estimate(abuse_rate: Fraction, users: int, monthly_cap_minor: int) -> Fraction:
    """Exact annual loss in minor units for a cap-saturating abuser share."""
    if not 0 <= abuse_rate <= 1:
        raise ValueError(f"abuse rate outside [0, 1]: {abuse_rate}")
    if users < 0 or monthly_cap_minor < 0:
        raise ValueError("users and cap must be non-negative")
    return Fraction(abuse_rate) * users * 12 * monthly_cap_minor


def format_millions(minor) -> str:
    """Minor units as millions of dollars, trimmed to >= 1 decimal."""
    frac = Fraction(minor) / (100 * 10**6)
    d = Decimal(frac.numerator) / Decimal(frac.denominator)
    s = format(d.normalize(), "f")
    if "." not in s:
        s += ".0"
    return s
