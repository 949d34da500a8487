import json

import pytest

from swarmgrid.cli import main

from test_env import duel_config


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestRun:
    def test_builtin_scenario_summary(self, capsys):
        code, out, _ = run_cli(
            capsys, "run", "pursuit", "--map-size", "12", "--steps", "10",
            "--json",
        )
        assert code == 0
        summary = json.loads(out)
        assert summary["scenario"] == "pursuit"
        assert summary["steps"] <= 10
        assert set(summary["mean_reward"]) == {"predator", "prey"}

    def test_scenario_file(self, capsys, tmp_path):
        path = tmp_path / "duel.json"
        path.write_text(duel_config(termination={"max_steps": 5}))
        code, out, _ = run_cli(capsys, "run", str(path), "--steps", "5",
                               "--json")
        assert code == 0
        assert json.loads(out)["steps"] == 5

    def test_missing_scenario_file(self, capsys):
        code, _, err = run_cli(capsys, "run", "no_such_file.json")
        assert code == 1
        assert "error:" in err

    def test_same_seed_same_summary(self, capsys):
        argv = ("run", "battle", "--map-size", "12", "--steps", "20",
                "--seed", "5", "--json")
        c1, o1, _ = run_cli(capsys, *argv)
        c2, o2, _ = run_cli(capsys, *argv)
        assert c1 == c2 == 0 and o1 == o2

    def test_record_writes_replay(self, capsys, tmp_path):
        rec = tmp_path / "ep.jsonl"
        code, _, _ = run_cli(
            capsys, "run", "pursuit", "--map-size", "12", "--steps", "6",
            "--record", str(rec),
        )
        assert code == 0
        lines = rec.read_text().strip().split("\n")
        assert json.loads(lines[0])["t"] == "header"
        assert len(lines) >= 2

    def test_bad_policy_spec(self, capsys):
        code, _, err = run_cli(
            capsys, "run", "pursuit", "--map-size", "12",
            "--policy", "predator-random",
        )
        assert code == 1
        assert "group=policy" in err

    def test_recorded_runs_byte_identical(self, capsys, tmp_path):
        paths = []
        for i in range(2):
            rec = tmp_path / f"ep{i}.jsonl"
            run_cli(capsys, "run", "battle", "--map-size", "12",
                    "--steps", "15", "--seed", "7", "--record", str(rec))
            paths.append(rec)
        assert paths[0].read_bytes() == paths[1].read_bytes()


class TestTrain:
    def test_short_training_produces_artifacts(self, capsys, tmp_path):
        ckpt = tmp_path / "m.npz"
        curve = tmp_path / "c.csv"
        code, out, _ = run_cli(
            capsys, "train", "pursuit", "predator", "--map-size", "8",
            "--episode-steps", "15", "--total-steps", "60",
            "--hidden", "4", "--batch-size", "4", "--eval-interval", "30",
            "--eval-episodes", "1", "--out", str(ckpt),
            "--curve", str(curve), "--json",
        )
        assert code == 0
        assert ckpt.exists()
        header, *rows = curve.read_text().strip().split("\n")
        assert header == "step,epsilon,mean_eval_reward"
        assert len(rows) == 2
        assert json.loads(out)["evaluations"] == 2

    def test_unknown_group(self, capsys):
        code, _, err = run_cli(capsys, "train", "pursuit", "ghosts",
                               "--total-steps", "10")
        assert code == 1
        assert "ghosts" in err

    def test_trained_checkpoint_usable_as_policy(self, capsys, tmp_path):
        ckpt = tmp_path / "m.npz"
        run_cli(
            capsys, "train", "pursuit", "predator", "--map-size", "8",
            "--episode-steps", "10", "--total-steps", "30", "--hidden", "4",
            "--batch-size", "4", "--eval-interval", "30",
            "--eval-episodes", "1", "--out", str(ckpt),
            "--curve", str(tmp_path / "c.csv"),
        )
        code, out, _ = run_cli(
            capsys, "run", "pursuit", "--map-size", "12", "--steps", "10",
            "--policy", f"predator={ckpt}", "--json",
        )
        assert code == 0
        assert json.loads(out)["steps"] <= 10


class TestCheck:
    def test_valid_program(self, capsys, tmp_path):
        f = tmp_path / "r.dsl"
        f.write_text(
            "symbol a: predator[any]\nsymbol b: prey[any]\n"
            "rule on attack(a, b) receiver a, b value 1, -1\n"
        )
        code, out, _ = run_cli(capsys, "check", str(f), "--json")
        assert code == 0
        assert json.loads(out) == {"file": str(f), "symbols": 2, "rules": 1,
                                   "status": "ok"}

    def test_syntax_error_diagnostic(self, capsys, tmp_path):
        f = tmp_path / "r.dsl"
        f.write_text("symbol a: g[any]\nrule on bogus(a) receiver a value 1\n")
        code, _, err = run_cli(capsys, "check", str(f))
        assert code == 1
        assert "2:9" in err  # line:column of the bad token

    def test_schema_validation(self, capsys, tmp_path):
        f = tmp_path / "r.dsl"
        f.write_text("symbol a: wolves[any]\n")
        code, _, err = run_cli(capsys, "check", str(f), "--schema", "pursuit")
        assert code == 1
        assert "wolves" in err


class TestBench:
    def test_small_benchmark(self, capsys):
        code, out, _ = run_cli(
            capsys, "bench", "--agents", "50", "--map", "32",
            "--steps", "5", "--json",
        )
        assert code == 0
        report = json.loads(out)
        assert report["agents"] == 50
        assert report["steps_per_second"] > 0
        assert report["peak_rss_mib"] > 0

    def test_overfull_map(self, capsys):
        code, _, err = run_cli(capsys, "bench", "--agents", "99999",
                               "--map", "8")
        assert code == 1
        assert "error:" in err


class TestReplay:
    def test_summary(self, capsys, tmp_path):
        rec = tmp_path / "ep.jsonl"
        run_cli(capsys, "run", "pursuit", "--map-size", "12", "--steps", "6",
                "--record", str(rec))
        code, out, _ = run_cli(capsys, "replay", str(rec), "--json")
        assert code == 0
        summary = json.loads(out)
        assert summary["frames"] >= 1
        assert not summary["truncated"]

    def test_truncated_exit_code(self, capsys, tmp_path):
        rec = tmp_path / "ep.jsonl"
        run_cli(capsys, "run", "pursuit", "--map-size", "12", "--steps", "6",
                "--record", str(rec))
        text = rec.read_text()
        rec.write_text(text[: int(len(text) * 0.9)])
        code, _, err = run_cli(capsys, "replay", str(rec), "--json")
        assert code == 2
        assert "truncated" in err

    def test_not_a_replay(self, capsys, tmp_path):
        bad = tmp_path / "x.jsonl"
        bad.write_text("garbage\n")
        code, _, err = run_cli(capsys, "replay", str(bad))
        assert code == 1
        assert "error:" in err


class TestSeedEnvVar:
    def test_env_var_default(self, monkeypatch, capsys):
        monkeypatch.setenv("SWARMGRID_SEED", "123")
        code, out, _ = run_cli(
            capsys, "run", "pursuit", "--map-size", "12", "--steps", "3",
            "--json",
        )
        assert code == 0
        assert json.loads(out)["seed"] == 123
