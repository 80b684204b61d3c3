import json
from fractions import Fraction

from rewardsim import EngineConfig, EventLog, Scenario, ScenarioEvent, run
from rewardsim.cli import EXIT_INPUT, EXIT_OK, EXIT_VIOLATION, main


def write_scenario(tmp_path, variant="defensive-instant", events=None,
                   auto_redeem=False):
    cfg = EngineConfig(
        reward_rate={"GROCERY": Fraction(5, 100)},
        monthly_cap={"GROCERY": 5000},
        variant=variant,
    )
    if events is None:
        events = [
            ScenarioEvent(day=1, kind="purchase", txn_id="t1",
                          amount_minor=10000, category="GROCERY"),
            ScenarioEvent(day=5, kind="refund", txn_id="t1", amount_minor=10000),
        ]
    sc = Scenario(label="cli", config=cfg, events=events, auto_redeem=auto_redeem)
    path = tmp_path / "scenario.json"
    sc.save(path)
    return path, sc


class TestSimulate:
    def test_clean_run(self, tmp_path, capsys):
        path, _ = write_scenario(tmp_path)
        code = main(["simulate", "--scenario", str(path)])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "invariants: ok" in out

    def test_writes_log_and_report(self, tmp_path):
        path, sc = write_scenario(tmp_path)
        log_path = tmp_path / "log.jsonl"
        out_path = tmp_path / "report.json"
        code = main([
            "simulate", "--scenario", str(path),
            "--log-out", str(log_path), "--out", str(out_path),
        ])
        assert code == EXIT_OK
        assert len(EventLog.read_jsonl(log_path)) > 0
        report = json.loads(out_path.read_text())
        assert report["label"] == "cli"
        assert report["final"]["net_reward_minor"] == 0

    def test_json_format(self, tmp_path, capsys):
        path, _ = write_scenario(tmp_path)
        code = main(["simulate", "--scenario", str(path), "--format", "json"])
        assert code == EXIT_OK
        assert json.loads(capsys.readouterr().out)["schema"] == 1

    def test_violating_variant_exits_2(self, tmp_path, capsys):
        path, _ = write_scenario(tmp_path, variant="A", events=[
            ScenarioEvent(day=1, kind="purchase", txn_id="t1",
                          amount_minor=10000, category="GROCERY"),
            ScenarioEvent(day=5, kind="refund", txn_id="t1", amount_minor=10000),
        ])
        code = main(["simulate", "--scenario", str(path)])
        assert code == EXIT_VIOLATION
        assert "VIOLATION" in capsys.readouterr().out

    def test_missing_file_exits_1(self, tmp_path, capsys):
        code = main(["simulate", "--scenario", str(tmp_path / "nope.json")])
        assert code == EXIT_INPUT
        assert "error:" in capsys.readouterr().err


class TestAttack:
    def test_vulnerable_issuer_exits_2(self, capsys):
        code = main(["attack", "--issuer", "A", "--cycles", "3"])
        assert code == EXIT_VIOLATION
        assert "value extracted: $15.00" in capsys.readouterr().out

    def test_resistant_issuer_exits_0(self, capsys):
        code = main(["attack", "--issuer", "defensive-instant", "--cycles", "3"])
        assert code == EXIT_OK
        assert "no value extracted" in capsys.readouterr().out

    def test_float_window_warns_but_passes(self, capsys):
        code = main(["attack", "--issuer", "F", "--timing", "same-cycle",
                     "--cycles", "3"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "WARNING" in out

    def test_unknown_issuer_exits_1(self, capsys):
        code = main(["attack", "--issuer", "Z"])
        assert code == EXIT_INPUT


class TestMatrix:
    def test_text_matches_golden(self, capsys, fixtures_dir):
        code = main(["matrix"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert out == (fixtures_dir / "matrix_golden.txt").read_text()

    def test_json_rows(self, capsys):
        code = main(["matrix", "--format", "json"])
        rows = json.loads(capsys.readouterr().out)
        assert code == EXIT_OK
        assert [r["variant"] for r in rows] == ["A", "B", "C", "D", "E", "F", "V3a"]


class TestCheck:
    def make_log(self, tmp_path, variant="defensive-instant"):
        path, sc = write_scenario(tmp_path, variant=variant)
        report = run(sc)
        log_path = tmp_path / "log.jsonl"
        report.log.write_jsonl(log_path)
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps(sc.config.to_json_dict()))
        return log_path, cfg_path

    def test_clean_log_passes(self, tmp_path, capsys):
        log_path, cfg_path = self.make_log(tmp_path)
        code = main(["check", "--log", str(log_path), "--config", str(cfg_path)])
        assert code == EXIT_OK
        assert "invariants hold" in capsys.readouterr().out

    def test_default_window_follows_variant(self, tmp_path, capsys):
        log_path, cfg_path = self.make_log(tmp_path, variant="defensive-cycle")
        code = main(["check", "--log", str(log_path), "--config", str(cfg_path)])
        assert code == EXIT_OK
        assert "allowed lag 30d" in capsys.readouterr().out

    def test_unbacked_reward_exits_2(self, tmp_path, capsys):
        log = EventLog()
        log.emit(day=0, kind="purchase", txn_id="t1", user="u1",
                 amount_minor=10000, category="GROCERY", period=0)
        log.emit(day=0, kind="settle", txn_id="t1", user="u1",
                 amount_minor=500, category="GROCERY", period=0)
        log.emit(day=2, kind="refund-posted", txn_id="t1", user="u1",
                 amount_minor=-10000, category="GROCERY", period=0)
        log_path = tmp_path / "bad.jsonl"
        log.write_jsonl(log_path)
        cfg = EngineConfig(reward_rate={"GROCERY": Fraction(5, 100)})
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps(cfg.to_json_dict()))
        code = main(["check", "--log", str(log_path), "--config", str(cfg_path)])
        assert code == EXIT_VIOLATION
        assert "VIOLATION" in capsys.readouterr().out

    def test_corrupt_log_exits_1(self, tmp_path, capsys):
        log_path = tmp_path / "corrupt.jsonl"
        log_path.write_text("{broken\n")
        _, cfg_path = self.make_log(tmp_path)
        code = main(["check", "--log", str(log_path), "--config", str(cfg_path)])
        assert code == EXIT_INPUT


class TestImpact:
    def test_single_estimate(self, capsys):
        code = main(["impact", "--p", "0.01", "--users", "1000000",
                     "--cap", "5000"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "$6,000,000.00" in out
        assert "6.0 $M" in out

    def test_fraction_argument(self, capsys):
        code = main(["impact", "--p", "1/100", "--users", "1000000",
                     "--cap", "5000"])
        assert code == EXIT_OK
        assert "$6,000,000.00" in capsys.readouterr().out

    def test_grid(self, capsys):
        code = main(["impact", "--table", "--cap", "5000"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        for cell in ("0.06", "60.0", "300.0"):
            assert cell in out

    def test_bad_rate_exits_1(self, capsys):
        code = main(["impact", "--p", "2.0"])
        assert code == EXIT_INPUT
