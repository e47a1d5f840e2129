"""CLI subcommands: outputs, exit codes, unit parsing."""

import json
import subprocess
import sys
import time

import pytest

from splitwise.cli import main, parse_address, parse_rate, parse_rate_list
from splitwise.cli import CliError
from splitwise.scenario import scenario_to_obj, Scenario
from splitwise.decision import ChannelState


@pytest.fixture()
def scenario_path(tmp_path):
    states = [{"batch": 1, "rate_bps": 5000.0}, {"batch": 1, "rate_bps": 10000.0}]
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(states))
    return path


class TestParsing:
    def test_rate_suffixes(self):
        assert parse_rate("2000bps") == 2000.0
        assert parse_rate("64kbps") == 64_000.0
        assert parse_rate("1mbps") == 1_000_000.0
        assert parse_rate("1MBps") == 1_000_000.0
        assert parse_rate("2500") == 2500.0

    def test_rate_errors(self):
        with pytest.raises(CliError):
            parse_rate("fast")
        with pytest.raises(CliError):
            parse_rate("-1mbps")
        with pytest.raises(CliError):
            parse_rate_list(" , ")

    def test_address(self):
        assert parse_address("127.0.0.1:9000") == ("127.0.0.1", 9000)
        with pytest.raises(CliError):
            parse_address("nohost")


class TestBottlenecks:
    def test_toy3_text(self, toy3_path, capsys):
        assert main(["bottlenecks", str(toy3_path)]) == 0
        out = capsys.readouterr().out
        assert "compressive bottlenecks (2): [2, 3]" in out

    def test_toy3_json(self, toy3_path, capsys):
        assert main(["bottlenecks", str(toy3_path), "--json"]) == 0
        obj = json.loads(capsys.readouterr().out)
        assert obj["compressive"] == [2, 3]
        assert obj["natural"] == [2, 3]

    def test_missing_file_exit_2(self, capsys):
        assert main(["bottlenecks", "does-not-exist.json"]) == 2
        assert "not found" in capsys.readouterr().err

    def test_invalid_profile_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"name": "x", "input_bytes_per_sample": 1, "layers": []}')
        assert main(["bottlenecks", str(bad)]) == 2
        assert "layers nonempty" in capsys.readouterr().err


class TestSurface:
    def test_toy3_three_rates(self, toy3_path, capsys):
        code = main(
            ["surface", str(toy3_path), "--batches", "1", "--rates", "2000bps,5000bps,10000bps"]
        )
        assert code == 0
        lines = capsys.readouterr().out.strip().split("\n")
        strategies = [line.split(",")[2] for line in lines[1:]]
        assert strategies == ["no_offload", "split", "full_offload"]

    def test_no_full_offload(self, toy3_path, capsys):
        code = main(
            [
                "surface", str(toy3_path),
                "--batches", "1",
                "--rates", "2000bps,5000bps,10000bps,1mbps",
                "--no-full-offload",
            ]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "full_offload" not in out

    def test_empty_rates_exit_2(self, toy3_path, capsys):
        assert main(["surface", str(toy3_path), "--batches", "1", "--rates", ""]) == 2

    def test_unmeasured_batch_exit_2(self, toy3_path, capsys):
        assert main(["surface", str(toy3_path), "--batches", "2", "--rates", "1mbps"]) == 2
        assert "not measured" in capsys.readouterr().err

    def test_json_output_round_trips(self, toy3_path, tmp_path):
        out = tmp_path / "surface.json"
        code = main(
            ["surface", str(toy3_path), "--batches", "1", "--rates", "5000bps", "--out", str(out)]
        )
        assert code == 0
        obj = json.loads(out.read_text())
        assert obj["cells"][0]["strategy"] == "split"
        assert obj["cells"][0]["split_layer"] == 2

    def test_byte_stable(self, toy3_path, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["surface", str(toy3_path), "--batches", "1", "--rates", "1mbps,8mbps"]
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestScenario:
    def test_golden_gain(self, toy3_path, scenario_path, capsys):
        code = main(
            ["scenario", str(toy3_path), str(scenario_path), "--baseline", "static:2"]
        )
        assert code == 0
        obj = json.loads(capsys.readouterr().out)
        assert obj["gain"] == pytest.approx(0.037037037, rel=1e-6)
        assert obj["switch_count"] == 1

    def test_baseline_matches_everywhere(self, toy3_path, tmp_path, capsys):
        path = tmp_path / "flat.json"
        path.write_text(json.dumps([{"batch": 1, "rate_bps": 5000.0}] * 3))
        assert main(["scenario", str(toy3_path), str(path), "--baseline", "static:2"]) == 0
        assert json.loads(capsys.readouterr().out)["gain"] == 0.0

    def test_non_candidate_baseline_exit_2(self, toy3_path, scenario_path, capsys):
        code = main(
            ["scenario", str(toy3_path), str(scenario_path), "--baseline", "static:1"]
        )
        assert code == 2
        assert "not a candidate split" in capsys.readouterr().err

    def test_csv_format(self, toy3_path, scenario_path, capsys):
        code = main(
            ["scenario", str(toy3_path), str(scenario_path), "--baseline", "full", "--format", "csv"]
        )
        assert code == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0].startswith("step,batch,rate_bps")
        assert len(lines) == 3


class TestServeDevice:
    def test_loopback_round_trip(self, toy3_path, tmp_path):
        port = _free_port()
        server = subprocess.Popen(
            [sys.executable, "-m", "splitwise.cli", "serve", str(toy3_path),
             "--listen", f"127.0.0.1:{port}"],
        )
        try:
            _wait_for_port(port)
            scenario = tmp_path / "s.json"
            scenario.write_text(
                json.dumps(scenario_to_obj(Scenario((
                    ChannelState(1, 2000.0), ChannelState(1, 5000.0), ChannelState(1, 10000.0),
                ))))
            )
            report_path = tmp_path / "report.json"
            code = main(
                ["device", str(toy3_path), str(scenario), "--connect", f"127.0.0.1:{port}",
                 "--report", str(report_path)]
            )
            assert code == 0
            report = json.loads(report_path.read_text())
            assert len(report["records"]) == 3
            assert all(r["status"] == "ok" for r in report["records"])
        finally:
            server.terminate()
            server.wait(timeout=10)

    def test_wrong_profile_exit_3(self, toy3_path, tmp_path, scenario_path):
        port = _free_port()
        other = tmp_path / "other.json"
        other.write_text(
            json.dumps(
                {
                    "name": "other",
                    "input_bytes_per_sample": 123,
                    "layers": [
                        {"name": "l1", "output_bytes_per_sample": 60,
                         "device_ms": {"1": 1.0}, "server_ms": {"1": 1.0}}
                    ],
                }
            )
        )
        server = subprocess.Popen(
            [sys.executable, "-m", "splitwise.cli", "serve", str(toy3_path),
             "--listen", f"127.0.0.1:{port}"],
        )
        try:
            _wait_for_port(port)
            code = main(
                ["device", str(other), str(scenario_path), "--connect", f"127.0.0.1:{port}",
                 "--report", str(tmp_path / "r.json")]
            )
            assert code == 3
        finally:
            server.terminate()
            server.wait(timeout=10)

    def test_closed_port_exit_3(self, toy3_path, scenario_path, tmp_path, capsys):
        port = _free_port()
        code = main(
            ["device", str(toy3_path), str(scenario_path), "--connect", f"127.0.0.1:{port}",
             "--report", str(tmp_path / "r.json")]
        )
        assert code == 3
        assert "cannot reach server" in capsys.readouterr().err


def _free_port():
    import socket

    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def _wait_for_port(port, timeout=10.0):
    import socket

    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        try:
            with socket.create_connection(("127.0.0.1", port), timeout=0.2) as probe:
                # handshake-free probe; server will see a bad preamble on close
                return
        except OSError:
            time.sleep(0.05)
    raise TimeoutError(f"server did not come up on port {port}")
