"""
Batch driver: config loading, output envelopes, determinism and exit codes
"""

import csv
import io
import json
import math

import pytest
from jsonschema import Draft202012Validator

from app import main as cli
from app.errors import InvariantViolation
from app.models import SCHEMA_PATH, DensityConfig, KolmogorovConfig
from app.utils.serialization import config_hash

KOLMOGOROV = {"generators": [{"kind": "rademacher"}], "lambdas": [2.0], "ks": [100], "trials": 500, "seed": 1}
LOCALIZED = {"generator": {"kind": "gaussian"}, "n_max": 2000, "trials": 30, "G": 4, "exponent": 2.0, "seed": 7}
OMEGA = {"x": 100000, "ms": [510510], "thresholds": [2, 3, 5, 7, 11, 13, 17], "mertens": False}
BROWNIAN = {"T": 1024, "grid": {"points_per_octave": 8}, "paths": 5, "G": 4, "exponent": 2.0}
DENSITY = {"x": 10000, "g": {"c": 1.1}, "K": [1.0]}
KUBILIUS = {"x": 10000, "r": 7}


@pytest.fixture
def write_config(tmp_path):
    def write(data, name="config.json"):
        path = tmp_path / name
        path.write_text(data if isinstance(data, str) else json.dumps(data), encoding="utf-8")
        return str(path)
    return write


def _run(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _error(err: str) -> dict:
    return json.loads(err.strip().splitlines()[-1])


class TestOutputs:

    def test_schedule_defaults(self, capsys):
        code, out, _ = _run(capsys, ["schedule"])
        assert code == 0
        envelope = json.loads(out)
        assert envelope["version"] == "1.0.0"
        assert envelope["seed"] == 0
        assert set(envelope["payload"]) == {"rows", "summary"}
        assert envelope["payload"]["summary"]["blocks"] == 6

    def test_kolmogorov_csv(self, capsys, write_config):
        code, out, _ = _run(capsys, ["kolmogorov", "--config", write_config(KOLMOGOROV), "--format", "csv"])
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "# version=1.0.0"
        assert lines[1].startswith("# config_hash=")
        assert lines[2] == "# seed=1"
        assert lines[3] == "generator,lambda,k,trials,empirical,bound,stderr"
        rows = list(csv.DictReader(io.StringIO("\n".join(lines[3:]))))
        assert rows[0]["bound"] == "0.25"
        assert rows[0]["generator"].startswith("rademacher(")

    def test_config_hash_covers_experiment_fields_only(self, capsys, write_config):
        path = write_config(KOLMOGOROV)
        _, out, _ = _run(capsys, ["kolmogorov", "--config", path, "--threads", "3"])
        envelope = json.loads(out)
        config = KolmogorovConfig.model_validate(KOLMOGOROV)
        assert envelope["config_hash"] == config_hash({"subcommand": "kolmogorov", **config.hashed_fields()})

    def test_seed_flag_overrides_config(self, capsys, write_config):
        path = write_config(KOLMOGOROV)
        _, first, _ = _run(capsys, ["kolmogorov", "--config", path])
        _, second, _ = _run(capsys, ["kolmogorov", "--config", path, "--seed", "2"])
        a, b = json.loads(first), json.loads(second)
        assert b["seed"] == 2
        assert a["config_hash"] != b["config_hash"]

    def test_out_file(self, capsys, write_config, tmp_path):
        target = tmp_path / "runs" / "kolmogorov.json"
        code, out, _ = _run(capsys, ["kolmogorov", "--config", write_config(KOLMOGOROV), "--out", str(target)])
        assert code == 0
        assert out == ""
        assert json.loads(target.read_text(encoding="utf-8"))["payload"]["summary"]["cells"] == 1

    def test_omega_scan_primorial(self, capsys, write_config):
        code, out, _ = _run(capsys, ["omega-scan", "--config", write_config(OMEGA), "--format", "csv"])
        assert code == 0
        rows = [line.split(",") for line in out.splitlines()[4:]]
        assert [int(r[2]) for r in rows] == [1, 2, 3, 4, 5, 6, 7]
        assert rows[0][3] == ""

    def test_omega_scan_rows_golden(self, capsys, write_config, golden):
        code, out, _ = _run(capsys, ["omega-scan", "--config", write_config(OMEGA)])
        assert code == 0
        golden("omega_scan_rows", json.loads(out)["payload"]["rows"])

    def test_density_huge_k(self, capsys, write_config):
        config = {"x": 10000, "g": {"c": 1.1}, "K": [1e300]}
        code, out, _ = _run(capsys, ["density", "--config", write_config(config)])
        assert code == 0
        payload = json.loads(out)["payload"]
        assert payload["rows"][0]["fraction"] == 1.0
        assert "Finite-x regime" in payload["summary"]["regime_caveat"]

    def test_density_infinite_k(self):
        record, columns = cli.execute("density", DensityConfig(x=10000, g={"c": 1.1}, K=[math.inf]))
        assert record.payload["rows"][0]["fraction"] == 1.0
        assert record.payload["rows"][0]["K"] == "inf"
        assert columns[0] == "K"

    def test_kubilius(self, capsys, write_config):
        code, out, _ = _run(capsys, ["kubilius", "--config", write_config(KUBILIUS)])
        assert code == 0
        payload = json.loads(out)["payload"]
        assert sum(row["sieve"] for row in payload["rows"]) == pytest.approx(1.0)
        assert payload["summary"]["tv"] <= 0.05
        assert "error_budget" in payload["summary"]

    def test_brownian(self, capsys, write_config):
        code, out, _ = _run(capsys, ["brownian", "--config", write_config(BROWNIAN)])
        assert code == 0
        payload = json.loads(out)["payload"]
        assert len(payload["rows"]) == 5 * 3
        assert payload["summary"]["paths"] == 5


class TestSchema:

    @pytest.fixture(scope="class")
    def validator(self):
        return Draft202012Validator(json.loads(SCHEMA_PATH.read_text(encoding="utf-8")))

    @pytest.mark.parametrize("subcommand, config", [
        ("schedule", None),
        ("kolmogorov", KOLMOGOROV),
        ("localized", LOCALIZED),
        ("brownian", BROWNIAN),
        ("omega-scan", OMEGA),
        ("density", DENSITY),
        ("kubilius", KUBILIUS),
    ])
    def test_json_output_matches_schema(self, capsys, write_config, validator, subcommand, config):
        argv = [subcommand] if config is None else [subcommand, "--config", write_config(config)]
        code, out, _ = _run(capsys, argv)
        assert code == 0
        errors = [e.message for e in validator.iter_errors(json.loads(out))]
        assert errors == []

    def test_schema_rejects_extra_keys(self, capsys, validator):
        _, out, _ = _run(capsys, ["schedule"])
        envelope = json.loads(out)
        envelope["payload"]["columns"] = ["j"]
        assert not validator.is_valid(envelope)

    def test_print_schema_matches_committed_file(self, capsys):
        with pytest.raises(SystemExit) as exit_info:
            cli.main(["--print-schema"])
        assert exit_info.value.code == 0
        printed = json.loads(capsys.readouterr().out)
        assert printed == json.loads(SCHEMA_PATH.read_text(encoding="utf-8"))


class TestDeterminism:

    def test_threads_do_not_change_payload(self, capsys, write_config):
        path = write_config(LOCALIZED)
        _, one, _ = _run(capsys, ["localized", "--config", path, "--threads", "1"])
        _, four, _ = _run(capsys, ["localized", "--config", path, "--threads", "4"])
        a, b = json.loads(one), json.loads(four)
        assert a["payload_sha256"] == b["payload_sha256"]
        assert a["config_hash"] == b["config_hash"]

    def test_reruns_are_identical(self, capsys, write_config):
        path = write_config(LOCALIZED)
        _, first, _ = _run(capsys, ["localized", "--config", path])
        _, second, _ = _run(capsys, ["localized", "--config", path])
        assert json.loads(first)["payload"] == json.loads(second)["payload"]


class TestExitCodes:

    def test_unknown_key(self, capsys, write_config):
        code, _, err = _run(capsys, ["kolmogorov", "--config", write_config({"trails": 10})])
        assert code == 2
        error = _error(err)
        assert error["error"] == "ConfigError"
        assert error["detail"]["errors"][0]["field"] == "trails"

    def test_malformed_json(self, capsys, write_config):
        code, _, err = _run(capsys, ["schedule", "--config", write_config('{"M": 1,\n "j_max": }')])
        assert code == 2
        assert _error(err)["detail"]["line"] == 2

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = _run(capsys, ["schedule", "--config", str(tmp_path / "absent.json")])
        assert code == 2

    def test_domain_error(self, capsys, write_config):
        code, _, err = _run(capsys, ["density", "--config", write_config({"x": 10000, "g": {"c": 1.5}})])
        assert code == 2
        assert "smallest_feasible_log10_x" in _error(err)["detail"]

    def test_horizon(self, capsys, write_config):
        config = {"generator": {"kind": "gaussian"}, "n_max": 100, "trials": 2, "G": 16}
        code, _, err = _run(capsys, ["localized", "--config", write_config(config)])
        assert code == 3
        error = _error(err)
        assert error["error"] == "HorizonExceededError"
        assert error["detail"]["max_level"] == 100.0

    def test_capacity(self, capsys, write_config):
        code, _, err = _run(capsys, ["omega-scan", "--config", write_config({"x": 2 * 10**8})])
        assert code == 3
        assert _error(err)["error"] == "CapacityError"

    def test_invariant_violation(self, capsys, monkeypatch):
        def broken(config):
            raise InvariantViolation("forced", {"where": "test"})

        monkeypatch.setitem(cli.COMMANDS, "schedule", broken)
        code, _, err = _run(capsys, ["schedule"])
        assert code == 4
        assert _error(err)["detail"] == {"where": "test"}

    def test_unexpected_error(self, capsys, monkeypatch):
        def broken(config):
            raise RuntimeError("boom")

        monkeypatch.setitem(cli.COMMANDS, "schedule", broken)
        code, _, _ = _run(capsys, ["schedule"])
        assert code == 1
