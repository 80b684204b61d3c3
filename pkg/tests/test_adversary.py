from fractions import Fraction

import pytest

from rewardsim import run_battery, run_ddra
from rewardsim.adversary import (
    CONTROL,
    CROSS_CYCLE,
    SAME_CYCLE,
    build_ddra_scenario,
)


class TestScenarioGeometry:
    def test_same_cycle_refund_lands_before_close(self):
        sc = build_ddra_scenario("A", timing=SAME_CYCLE, cycles=2)
        days = [(e.kind, e.day) for e in sc.events]
        assert days == [
            ("purchase", 2), ("refund", 12), ("purchase", 32), ("refund", 42)
        ]

    def test_cross_cycle_refund_lands_after_close(self):
        sc = build_ddra_scenario("B", timing=CROSS_CYCLE, cycles=2)
        days = [(e.kind, e.day) for e in sc.events]
        assert days == [
            ("purchase", 20), ("refund", 35), ("purchase", 50), ("refund", 65)
        ]

    def test_control_never_refunds(self):
        sc = build_ddra_scenario("C", timing=CONTROL, cycles=3)
        assert all(e.kind == "purchase" for e in sc.events)

    def test_unknown_timing(self):
        with pytest.raises(ValueError):
            build_ddra_scenario("A", timing="sideways")


class TestVulnerableVariants:
    def test_a_retains_full_reward_every_cycle(self):
        o = run_ddra("A", timing=SAME_CYCLE, cycles=12)
        assert o.value_extracted == 6000  # 12 x 5.00
        assert o.redeemed_minor == 6000
        assert o.net_spend_final == 0
        assert o.float_days is None  # no clawback ever posts

    def test_b_cross_cycle_extracts_after_auto_redeem(self):
        o = run_ddra("B", timing=CROSS_CYCLE, cycles=12)
        assert o.value_extracted == 6000
        assert o.redeemed_minor == 6000

    def test_b_same_cycle_netting_blocks_extraction(self):
        o = run_ddra("B", timing=SAME_CYCLE, cycles=12)
        assert o.value_extracted == 0
        assert o.redeemed_minor == 0

    def test_v3a_floor_discards_the_debt(self):
        o = run_ddra("V3a", timing=SAME_CYCLE, cycles=12)
        assert o.value_extracted == 6000
        assert o.balance_minor == 0  # never allowed to go negative


class TestResistantVariants:
    @pytest.mark.parametrize("variant", ["C", "D", "E", "defensive-instant",
                                         "defensive-cycle"])
    @pytest.mark.parametrize("timing", [SAME_CYCLE, CROSS_CYCLE])
    def test_nothing_survives_quiescence(self, variant, timing):
        o = run_ddra(variant, timing=timing, cycles=6)
        assert o.value_extracted == 0

    def test_f_recovers_but_leaves_a_float_window(self):
        o = run_ddra("F", timing=SAME_CYCLE, cycles=6)
        assert o.value_extracted == 0
        assert o.float_days == 28  # redeemed day 2, clawed at close day 30
        assert all(lag == 18 for lag in o.refund_clawback_lags)

    def test_c_claws_the_same_day(self):
        o = run_ddra("C", timing=SAME_CYCLE, cycles=6)
        assert all(lag == 0 for lag in o.refund_clawback_lags)

    def test_partial_refund_scales_extraction(self):
        full = run_ddra("A", timing=CROSS_CYCLE, cycles=12)
        half = run_ddra("A", timing=CROSS_CYCLE, cycles=12,
                        refund_fraction=Fraction(1, 2))
        assert half.value_extracted == full.value_extracted // 2


class TestBattery:
    def test_battery_shape(self):
        outs = run_battery("C", cycles=3)
        assert [o.timing for o in outs] == [
            SAME_CYCLE, CROSS_CYCLE, CROSS_CYCLE, CONTROL
        ]
        fractions = [o.refund_fraction for o in outs]
        assert fractions[2] == Fraction(1, 2)

    def test_control_extracts_nothing_anywhere(self):
        for variant in ["A", "B", "C", "D", "E", "F", "V3a"]:
            o = run_ddra(variant, timing=CONTROL, cycles=3)
            assert o.value_extracted == 0, variant
