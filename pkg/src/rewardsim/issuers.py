"""Issuer behavior variants and the comparative classification matrix.

Each variant is a fixed tuple of four behavioral dimensions.  The same
simulation core runs every variant; only the dispatch described by the
tuple differs.  ``classify`` maps a standard attack battery to the
checkmark / cross / tilde labels of the comparison matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

# reward_timing: when settlement rewards are credited
INSTANT = "instant"
STATEMENT_CLOSE = "statement-close"

# refund_adjustment: when (whether) granted rewards are clawed back
ADJ_NONE = "none"
ADJ_SAME_CYCLE_ONLY = "same-cycle-only"
ADJ_IMMEDIATE = "immediate"
ADJ_STATEMENT_CLOSE = "statement-close"

# negative_balance handling
NEG_UNSUPPORTED = "unsupported"
NEG_ZERO_FLOORED = "zero-floored"
NEG_INDEFINITE = "indefinite"


@dataclass(frozen=True)
class IssuerVariant:
    name: str
    reward_timing: str
    refund_adjustment: str
    negative_balance: str
    auto_redeem_at_close: bool = False
    uses_grace_hold: bool = False


VARIANTS = {
    v.name: v
    for v in [
        IssuerVariant("A", INSTANT, ADJ_NONE, NEG_UNSUPPORTED),
        IssuerVariant("B", STATEMENT_CLOSE, ADJ_SAME_CYCLE_ONLY, NEG_UNSUPPORTED,
                      auto_redeem_at_close=True),
        IssuerVariant("C", INSTANT, ADJ_IMMEDIATE, NEG_INDEFINITE),
        IssuerVariant("D", STATEMENT_CLOSE, ADJ_STATEMENT_CLOSE, NEG_INDEFINITE),
        IssuerVariant("E", STATEMENT_CLOSE, ADJ_STATEMENT_CLOSE, NEG_INDEFINITE),
        IssuerVariant("F", INSTANT, ADJ_STATEMENT_CLOSE, NEG_INDEFINITE),
        IssuerVariant("V3a", INSTANT, ADJ_IMMEDIATE, NEG_ZERO_FLOORED),
        IssuerVariant("defensive-instant", INSTANT, ADJ_IMMEDIATE, NEG_INDEFINITE),
        IssuerVariant("defensive-cycle", STATEMENT_CLOSE, ADJ_STATEMENT_CLOSE,
                      NEG_INDEFINITE, uses_grace_hold=True),
    ]
}

MATRIX_VARIANTS = ["A", "B", "C", "D", "E", "F"]


def get_variant(name: str) -> IssuerVariant:
    try:
        return VARIANTS[name]
    except KeyError:
        raise KeyError(
            f"unknown issuer variant {name!r}; choose from {sorted(VARIANTS)}"
        ) from None


# Display labels for the descriptive matrix dimensions.  Same-cycle-only
# adjustment displays as "None": once a reward has been granted it is
# never adjusted (same-cycle netting happens before the grant).
_TIMING_LABEL = {INSTANT: "Instant", STATEMENT_CLOSE: "Stmt. close"}
_ADJUST_LABEL = {
    ADJ_NONE: "None",
    ADJ_SAME_CYCLE_ONLY: "None",
    ADJ_IMMEDIATE: "Immediate",
    ADJ_STATEMENT_CLOSE: "Stmt. close",
}
_NEG_LABEL = {
    NEG_UNSUPPORTED: "N/A",
    NEG_ZERO_FLOORED: "Floored at zero",
    NEG_INDEFINITE: "Indefinite",
}

PASS = "✓"  # check mark
FAIL = "×"  # multiplication sign
PARTIAL = "~"


def classify(variant: IssuerVariant, outcomes) -> str:
    """Label a variant from its attack-battery outcomes.

    Rules (documented in matrix output):
      FAIL    - some scenario retains extracted value at quiescence
                (a refund produced zero effective clawback).
      PARTIAL - nothing is retained at quiescence, but in the same-cycle
                scenario a clawback posted strictly later than its refund
                while the reward had already been redeemable (the
                instant-availability / batched-clawback asymmetry).
      PASS    - every refund clawed back proportionally with no
                extraction window.
    """
    if any(o.value_extracted > 0 for o in outcomes):
        return FAIL
    for o in outcomes:
        if o.timing != "same-cycle":
            continue
        if any(lag is not None and lag > 0 for lag in o.refund_clawback_lags):
            return PARTIAL
    return PASS


CLASSIFICATION_NOTE = (
    f"{FAIL} = value retained at quiescence (zero effective clawback); "
    f"{PARTIAL} = clawback posts, but same-cycle refunds lag behind "
    "redeemable rewards (extraction float window); "
    f"{PASS} = proportional clawback with no extraction window. "
    "* balance persists indefinitely, but recovery depends on future "
    "qualifying spend."
)


def comparison_matrix(battery: dict) -> list[dict]:
    """Build matrix rows from ``battery``: variant name -> outcome list.

    Rows cover A-F in order, plus a V3a appendix row when present.
    """
    rows = []
    names = [n for n in MATRIX_VARIANTS if n in battery]
    if "V3a" in battery:
        names.append("V3a")
    for name in names:
        variant = get_variant(name)
        label = classify(variant, battery[name])
        neg = _NEG_LABEL[variant.negative_balance]
        if name == "F":
            neg += "*"
        rows.append(
            {
                "variant": name,
                "reward_timing": _TIMING_LABEL[variant.reward_timing],
                "refund_adjustment": _ADJUST_LABEL[variant.refund_adjustment],
                "negative_balance": neg,
                "reward_integrity": label,
                "refund_reward_consistency": label,
            }
        )
    return rows


def render_matrix(rows: list[dict]) -> str:
    """Fixed-width text table; byte-stable for golden-file comparison."""
    headers = [
        ("variant", "Variant"),
        ("reward_timing", "Reward Timing"),
        ("refund_adjustment", "Refund Adjustment"),
        ("negative_balance", "Neg. Balance"),
        ("reward_integrity", "RI"),
        ("refund_reward_consistency", "RRC"),
    ]
    widths = {
        key: max(len(title), *(len(r[key]) for r in rows)) for key, title in headers
    }
    lines = [
        "  ".join(title.ljust(widths[key]) for key, title in headers).rstrip()
    ]
    for r in rows:
        lines.append(
            "  ".join(r[key].ljust(widths[key]) for key, _ in headers).rstrip()
        )
    lines.append("")
    lines.append(CLASSIFICATION_NOTE)
    return "\n".join(lines) + "\n"
