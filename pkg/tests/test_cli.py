"""CLI behavior: exit codes, config precedence, deterministic outputs."""

import json

import numpy as np

from depcat.cli import (
    EXIT_CAP,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VALIDATION,
    EXIT_VERIFICATION,
    main,
)

SEQ_ARGS = ["--generator", "sequential", "--p", "0.5,0.3,0.2", "--delta", "0.4", "--n", "6"]


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestValidate:
    def test_valid_generator(self, capsys):
        code, out, _ = run(["validate", "--generator", "sequential", "--n", "100"], capsys)
        assert code == EXIT_OK
        assert "valid" in out

    def test_violation_exit_and_message(self, capsys):
        spec = json.dumps({"kind": "table", "table": {"2": 1, "3": 5}})
        code, out, _ = run(["validate", "--generator", spec, "--n", "3"], capsys)
        assert code == EXIT_VALIDATION
        assert "n=3" in out and "alpha=5" in out

    def test_sin_drift_ten_thousand(self, capsys):
        code, _, _ = run(["validate", "--generator", "sin_drift", "--n", "10000"], capsys)
        assert code == EXIT_OK


class TestGraph:
    def test_dot_output(self, capsys):
        code, out, _ = run(
            ["graph", "--generator", "fk", "--n", "3", "--format", "dot"], capsys
        )
        assert code == EXIT_OK
        assert "2 -> 1;" in out and "3 -> 1;" in out

    def test_json_output(self, capsys):
        code, out, _ = run(
            ["graph", "--generator", "floor_sqrt", "--n", "9", "--format", "json"], capsys
        )
        assert code == EXIT_OK
        assert json.loads(out) == {
            "2": 1, "3": 1, "4": 2, "5": 2, "6": 2, "7": 2, "8": 2, "9": 3,
        }

    def test_invalid_generator_exit(self, capsys):
        spec = json.dumps({"kind": "table", "table": {"2": 2}})
        code, _, err = run(["graph", "--generator", spec, "--n", "2"], capsys)
        assert code == EXIT_VALIDATION
        assert "error" in err


class TestCovariance:
    def test_example_golden_json(self, capsys):
        code, out, _ = run(
            ["covariance", "2", "3", *SEQ_ARGS, "--method", "enumerate"], capsys
        )
        assert code == EXIT_OK
        payload = json.loads(out)
        golden = 0.4 * np.array(
            [[0.25, -0.15, -0.10], [-0.15, 0.21, -0.06], [-0.10, -0.06, 0.16]]
        )
        assert payload["exponent_basis"] == "theorem"
        assert np.max(np.abs(np.array(payload["matrix"]) - golden)) <= 1e-12

    def test_zero_delta_both_methods(self, capsys):
        argv = [
            "covariance", "2", "3",
            "--generator", "sequential", "--p", "0.5,0.3,0.2",
            "--delta", "0", "--n", "6",
        ]
        code, out, _ = run(argv, capsys)
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload["method"] == "both"
        assert payload["max_abs_discrepancy"] <= 1e-15
        assert np.max(np.abs(np.array(payload["enumerated"]))) <= 1e-15

    def test_both_discrepancy_on_general_generator(self, capsys):
        argv = [
            "covariance", "2", "4",
            "--generator", "floor_sqrt", "--p", "0.5,0.3,0.2",
            "--delta", "0.5", "--n", "4",
        ]
        code, out, _ = run(argv, capsys)
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload["max_abs_discrepancy"] < 1e-10
        assert payload["exponent_basis"] == "tree-conjecture"
        assert "conjectured" in payload["note"]

    def test_csv_format(self, capsys):
        code, out, _ = run(
            ["covariance", "2", "3", *SEQ_ARGS, "--method", "closed", "--format", "csv"],
            capsys,
        )
        assert code == EXIT_OK
        lines = out.strip().splitlines()
        assert lines[0] == "category,1,2,3"
        assert len(lines) == 4

    def test_both_with_csv_is_usage_error(self, capsys):
        code, _, err = run(
            ["covariance", "2", "3", *SEQ_ARGS, "--format", "csv"], capsys
        )
        assert code == EXIT_USAGE
        assert "json" in err

    def test_cap_exceeded(self, capsys):
        argv = [
            "covariance", "1", "16",
            "--generator", "sequential", "--p", "0.5,0.3,0.2",
            "--delta", "0.4", "--n", "16", "--cap", "1000",
            "--method", "enumerate",
        ]
        code, _, err = run(argv, capsys)
        assert code == EXIT_CAP
        assert "cap" in err

    def test_position_order_usage_error(self, capsys):
        code, _, _ = run(["covariance", "3", "2", *SEQ_ARGS], capsys)
        assert code == EXIT_USAGE


class TestSample:
    def test_deterministic_across_runs_and_workers(self, capsys, tmp_path):
        base = [
            "sample", "--generator", "sequential", "--p", "0.5,0.5",
            "--delta", "0.5", "--n", "4", "--seed", "42", "--count", "200",
        ]
        paths = []
        for tag, workers in (("a", "1"), ("b", "1"), ("c", "4")):
            prefix = str(tmp_path / tag)
            code, _, _ = run(base + ["--out-prefix", prefix, "--workers", workers], capsys)
            assert code == EXIT_OK
            paths.append(prefix)
        reference = (tmp_path / "a.csv").read_bytes()
        assert (tmp_path / "b.csv").read_bytes() == reference
        assert (tmp_path / "c.csv").read_bytes() == reference
        meta = (tmp_path / "a.meta.json").read_bytes()
        assert (tmp_path / "c.meta.json").read_bytes() == meta

    def test_jsonl_format(self, capsys, tmp_path):
        prefix = str(tmp_path / "batch")
        argv = [
            "sample", "--generator", "fk", "--p", "0.5,0.5", "--delta", "1",
            "--n", "3", "--seed", "7", "--count", "5",
            "--out-prefix", prefix, "--format", "jsonl",
        ]
        code, _, _ = run(argv, capsys)
        assert code == EXIT_OK
        lines = (tmp_path / "batch.jsonl").read_text().strip().splitlines()
        assert len(lines) == 5
        for line in lines:
            row = json.loads(line)
            assert len(set(row)) == 1  # delta = 1: constant sequences

    def test_metadata_sidecar(self, capsys, tmp_path):
        prefix = str(tmp_path / "m")
        argv = [
            "sample", "--generator", "sequential", "--p", "0.5,0.5",
            "--delta", "0.25", "--n", "3", "--seed", "11", "--count", "4",
            "--out-prefix", prefix,
        ]
        assert run(argv, capsys)[0] == EXIT_OK
        meta = json.loads((tmp_path / "m.meta.json").read_text())
        assert meta["seed"] == 11
        assert meta["algorithm"] == "splitmix64-2level"
        assert meta["generator"] == {"kind": "sequential"}

    def test_missing_seed_is_usage_error(self, capsys, tmp_path):
        argv = [
            "sample", "--generator", "sequential", "--p", "0.5,0.5",
            "--delta", "0.5", "--n", "4", "--count", "10",
            "--out-prefix", str(tmp_path / "x"),
        ]
        code, _, err = run(argv, capsys)
        assert code == EXIT_USAGE
        assert "seed" in err


class TestVerify:
    def test_passes_on_chain(self, capsys):
        code, out, _ = run(["verify", *SEQ_ARGS], capsys)
        assert code == EXIT_OK
        lines = out.strip().splitlines()
        assert len(lines) == 4
        assert all("PASS" in line for line in lines)
        assert all("max error" in line for line in lines)

    def test_fk_and_zero_delta(self, capsys):
        code, out, _ = run(
            ["verify", "--generator", "fk", "--p", "0.7,0.3", "--delta", "0",
             "--n", "8"],
            capsys,
        )
        assert code == EXIT_OK
        assert "covariance-agreement" in out

    def test_cap_suggests_reduction(self, capsys):
        code, _, err = run(
            ["verify", *SEQ_ARGS[:-2], "--n", "16", "--cap", "100"], capsys
        )
        assert code == EXIT_CAP
        assert "reduce N" in err

    def test_failed_check_maps_to_verification_exit(self, capsys, monkeypatch):
        import depcat.cli as cli_module
        from depcat import VerificationCheck

        monkeypatch.setattr(
            cli_module,
            "verification_suite",
            lambda *args, **kwargs: [VerificationCheck("normalization", 1.0, 1e-10)],
        )
        code, out, _ = run(["verify", *SEQ_ARGS], capsys)
        assert code == EXIT_VERIFICATION
        assert "FAIL" in out


class TestConfigHandling:
    def test_config_file_supplies_everything(self, capsys, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(
            json.dumps(
                {
                    "K": 3,
                    "N": 5,
                    "p": [0.5, 0.3, 0.2],
                    "delta": 0.4,
                    "generator": {"kind": "sequential"},
                    "enumeration_cap": 10_000_000,
                }
            )
        )
        code, out, _ = run(["verify", "--config", str(config)], capsys)
        assert code == EXIT_OK
        assert "PASS" in out

    def test_flags_override_config(self, capsys, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(
            json.dumps({"N": 3, "generator": {"kind": "fk"}})
        )
        code, out, _ = run(
            ["graph", "--config", str(config), "--generator", "sequential",
             "--format", "json"],
            capsys,
        )
        assert code == EXIT_OK
        assert json.loads(out) == {"2": 1, "3": 2}

    def test_table_generator_in_config(self, capsys, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(
            json.dumps(
                {"N": 4, "generator": {"kind": "table", "table": {"2": 1, "3": 1, "4": 2}}}
            )
        )
        code, out, _ = run(["graph", "--config", str(config), "--format", "json"], capsys)
        assert code == EXIT_OK
        assert json.loads(out) == {"2": 1, "3": 1, "4": 2}

    def test_k_p_mismatch(self, capsys):
        code, _, err = run(
            ["validate", "--generator", "fk", "--n", "3", "--k", "4",
             "--p", "0.5,0.5"],
            capsys,
        )
        assert code == EXIT_USAGE
        assert "conflict" in err

    def test_malformed_config_file(self, capsys, tmp_path):
        config = tmp_path / "broken.json"
        config.write_text("{not json")
        code, _, err = run(["validate", "--config", str(config)], capsys)
        assert code == EXIT_USAGE
        assert "JSON" in err

    def test_missing_generator(self, capsys):
        code, _, err = run(["validate", "--n", "5"], capsys)
        assert code == EXIT_USAGE
        assert "generator" in err

    def test_out_file(self, capsys, tmp_path):
        out_path = tmp_path / "tree.dot"
        code, out, _ = run(
            ["graph", "--generator", "fk", "--n", "3", "--out", str(out_path)], capsys
        )
        assert code == EXIT_OK
        assert out == ""
        assert "2 -> 1;" in out_path.read_text()


def test_verification_failure_exit_code_exists():
    # the constant is part of the CLI contract even though a healthy build
    # never produces it
    assert EXIT_VERIFICATION == 4
