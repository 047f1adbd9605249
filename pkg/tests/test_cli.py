"""End-to-end checks of the command-line harness."""

import csv
import io
import math

import pytest

from leoisl.cli import main
from leoisl.orbits import ConstellationConfig
from leoisl.topology import build_grid_topology
from leoisl.orbits import propagate


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    return list(csv.reader(io.StringIO(text)))


class TestPropagateCommand:
    def test_csv_shape_and_radius(self, capsys):
        code, out, _ = run_cli(["propagate", "--epoch", "100"], capsys)
        assert code == 0
        rows = parse_csv(out)
        assert rows[0][:3] == ["sat_id", "plane", "slot"]
        assert len(rows) == 1 + 120
        x, y, z = (float(v) for v in rows[1][3:6])
        assert math.sqrt(x * x + y * y + z * z) == pytest.approx(7371.0, rel=1e-9)


class TestTopologyCommand:
    def test_grid_edge_count_matches_builder(self, capsys):
        code, out, _ = run_cli(["topology", "--mode", "grid", "--epoch", "0"], capsys)
        assert code == 0
        rows = parse_csv(out)
        config = ConstellationConfig()
        snapshot = build_grid_topology(propagate(config, 0.0), config, 0.0)
        assert len(rows) - 1 == len(snapshot.edges)
        assert {row[3] for row in rows[1:]} == {"isl_laser"}
        # Handshake: twice the edge count equals the degree sum, <= 4 each.
        degree = {}
        for row in rows[1:]:
            degree[row[1]] = degree.get(row[1], 0) + 1
            degree[row[2]] = degree.get(row[2], 0) + 1
        assert max(degree.values()) <= 4

    def test_dynamic_budget_flag(self, capsys):
        code, out, _ = run_cli(
            ["topology", "--mode", "dynamic", "--max-isls", "1"], capsys
        )
        assert code == 0
        rows = parse_csv(out)
        degree = {}
        for row in rows[1:]:
            degree[row[1]] = degree.get(row[1], 0) + 1
            degree[row[2]] = degree.get(row[2], 0) + 1
        assert max(degree.values()) <= 1


class TestRouteCommand:
    def test_self_route(self, capsys):
        code, out, _ = run_cli(
            ["route", "--src", "gs-london", "--dst", "gs-london"], capsys
        )
        assert code == 0
        assert "hops: 0" in out

    def test_unknown_node(self, capsys):
        code, _, err = run_cli(["route", "--src", "gs-london", "--dst", "nope"], capsys)
        assert code == 1
        assert "unknown node" in err


class TestHopsCommand:
    def test_pairs_file(self, tmp_path, capsys):
        pairs = tmp_path / "pairs.csv"
        pairs.write_text(
            "pair_id,lat_a,lon_a,lat_b,lon_b\n"
            "london-singapore,51.5,-0.13,1.35,103.82\n"
        )
        code, out, _ = run_cli(
            ["hops", "--pairs", str(pairs), "--epochs", "2"], capsys
        )
        assert code == 0
        rows = parse_csv(out)
        assert rows[0] == ["pair_id", "epoch_s", "min_hops", "max_hops", "mean_hops", "spread"]
        assert len(rows) == 3

    def test_missing_pairs_file(self, capsys):
        code, _, err = run_cli(["hops", "--pairs", "/nonexistent.csv"], capsys)
        assert code == 1


class TestSdpMhpCommand:
    def test_fraction_report(self, capsys):
        code, out, _ = run_cli(
            ["sdp-mhp", "--pairs", "20", "--epochs", "2", "--seed", "3"], capsys
        )
        assert code == 0
        assert "fraction:" in out
        fraction = float(out.splitlines()[0].split(":")[1])
        assert 0.0 <= fraction <= 1.0


class TestIfcSweepCommand:
    def test_csv_schema_and_trend(self, capsys):
        code, out, _ = run_cli(
            [
                "ifc-sweep",
                "--isls",
                "1..3",
                "--modes",
                "optimized,full",
                "--seeds",
                "3",
            ],
            capsys,
        )
        assert code == 0
        rows = parse_csv(out)
        assert rows[0] == list(
            ("max_isls", "mode", "seed", "epoch_s", "avg_delay_s", "delivered", "undelivered")
        )
        assert len(rows) == 1 + 3 * 2 * 3
        means = {}
        for row in rows[1:]:
            means.setdefault((row[0], row[1]), []).append(float(row[4]))
        opt = [sum(means[(str(k), "optimized")]) / 3 for k in (1, 2, 3)]
        assert opt[0] >= opt[1] - 1e-12 >= opt[2] - 2e-12

    def test_byte_identical_reruns(self, tmp_path, capsys):
        args = [
            "ifc-sweep",
            "--isls",
            "1..2",
            "--modes",
            "optimized",
            "--seeds",
            "2",
        ]
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        assert main(args + ["--output", str(first)]) == 0
        assert main(args + ["--output", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_unknown_mode_is_bad_input(self, capsys):
        code, _, err = run_cli(["ifc-sweep", "--modes", "psychic"], capsys)
        assert code == 1
        assert "psychic" in err


class TestBadInput:
    def test_unknown_subcommand(self, capsys):
        code, _, _ = run_cli(["transmogrify"], capsys)
        assert code == 1

    def test_bad_scenario_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, _, err = run_cli(["propagate", "--scenario", str(bad)], capsys)
        assert code == 1
        assert "invalid JSON" in err
