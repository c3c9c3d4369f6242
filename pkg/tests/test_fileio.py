"""Network file parsing, serialization round-trips, trace emission."""

import json
from importlib import resources

import pytest

from loopflow.fileio import (
    NetworkFileError,
    network_from_dict,
    network_to_dict,
    parse_network,
    read_flows_csv,
    trace_rows,
    write_flows_csv,
    write_network,
    write_trace,
)
from loopflow.solvers import SolverConfig, solve_node_loop

import fixture_tables as tables


def fixture_path(name: str, tmp_path):
    data = resources.files("loopflow").joinpath(f"data/{name}").read_text()
    path = tmp_path / name
    path.write_text(data)
    return path


def fixture_dict(name: str) -> dict:
    data = resources.files("loopflow").joinpath(f"data/{name}").read_text()
    return json.loads(data)


class TestParseNetwork:
    def test_fixture_contents(self, tmp_path):
        net = parse_network(fixture_path("fixture_gas.json", tmp_path))
        assert len(net.pipes) == 15
        assert len(net.nodes) == 11
        assert net.explicit_loops is not None and len(net.explicit_loops) == 5
        assert net.loop_count == 5
        # gross input at the supply node: 6940 net plus its own 60 offtake
        assert -min(n.demand_m3h for n in net.nodes) + 60.0 == pytest.approx(7000.0)

    def test_missing_diameter_names_pipe(self, tmp_path):
        raw = fixture_dict("fixture_gas.json")
        del raw["pipes"][2]["diameter_m"]
        path = tmp_path / "broken.json"
        path.write_text(json.dumps(raw))
        with pytest.raises(NetworkFileError, match=r"pipes\[2\].*diameter_m"):
            parse_network(path)

    def test_unbalanced_demands_rejected(self, tmp_path):
        raw = fixture_dict("fixture_gas.json")
        raw["nodes"][1]["demand_m3h"] = 2101.0
        path = tmp_path / "unbalanced.json"
        path.write_text(json.dumps(raw))
        with pytest.raises(NetworkFileError, match="unbalanced demands"):
            parse_network(path)

    def test_unknown_keys_rejected(self, tmp_path):
        raw = fixture_dict("fixture_gas.json")
        raw["pipes"][0]["color"] = "red"
        path = tmp_path / "unknown.json"
        path.write_text(json.dumps(raw))
        with pytest.raises(NetworkFileError, match="unknown key"):
            parse_network(path)
        raw = fixture_dict("fixture_gas.json")
        raw["extra_section"] = {}
        path.write_text(json.dumps(raw))
        with pytest.raises(NetworkFileError, match="unknown section"):
            parse_network(path)

    def test_syntax_error_reports_line(self, tmp_path):
        path = tmp_path / "syntax.json"
        path.write_text('{"fluid": {,}')
        with pytest.raises(NetworkFileError, match="line 1"):
            parse_network(path)

    def test_type_errors(self, tmp_path):
        raw = fixture_dict("fixture_gas.json")
        raw["pipes"][0]["id"] = "one"
        path = tmp_path / "types.json"
        path.write_text(json.dumps(raw))
        with pytest.raises(NetworkFileError, match="must be an integer"):
            parse_network(path)

    def test_incomplete_initial_flows_rejected(self, tmp_path):
        raw = fixture_dict("fixture_gas.json")
        del raw["initial_flows"][3]
        path = tmp_path / "partial.json"
        path.write_text(json.dumps(raw))
        with pytest.raises(NetworkFileError, match="initial flow missing"):
            parse_network(path)

    def test_zero_loop_entry_rejected(self, tmp_path):
        raw = fixture_dict("fixture_gas.json")
        raw["loops"][0] = [1, -2, 0, 4]
        path = tmp_path / "zero.json"
        path.write_text(json.dumps(raw))
        with pytest.raises(NetworkFileError, match="signed pipe ids"):
            parse_network(path)


class TestRoundTrip:
    @pytest.mark.parametrize("name", ["fixture_gas.json", "fixture_water.json"])
    def test_parse_serialize_parse(self, name, tmp_path):
        first = parse_network(fixture_path(name, tmp_path))
        out = tmp_path / "roundtrip.json"
        write_network(first, out)
        second = parse_network(out)
        assert first == second

    def test_dict_round_trip_preserves_sections(self):
        raw = fixture_dict("fixture_water.json")
        net = network_from_dict(raw)
        again = network_to_dict(net)
        assert again["loops"] == raw["loops"]
        assert again["reference_node"] == raw["reference_node"]
        assert len(again["initial_flows"]) == 15


class TestTrace:
    def test_column_count_is_iterations_plus_two(self, gas_network):
        report = solve_node_loop(gas_network, SolverConfig())
        rows = trace_rows(report, gas_network)
        expected_cols = len(report.iterations) + 2
        assert all(len(row) == expected_cols for row in rows)
        assert len(rows) == 1 + len(gas_network.pipes)

    def test_cells_match_reference_table(self, gas_network):
        report = solve_node_loop(gas_network, SolverConfig())
        rows = trace_rows(report, gas_network)
        for row in rows[1:]:
            pid = int(row[0])
            cells = [float(c) for c in row[1:-1]]
            for got, want in zip(cells, tables.GAS_TRACE[pid]):
                assert got == pytest.approx(want, abs=1.0)

    def test_two_decimal_formatting(self, gas_network, tmp_path):
        report = solve_node_loop(gas_network, SolverConfig())
        out = tmp_path / "trace.csv"
        write_trace(report, gas_network, out)
        lines = out.read_text().strip().splitlines()
        assert lines[0].startswith("pipe,initial,1,")
        for cell in lines[1].split(",")[1:]:
            whole, frac = cell.split(".")
            assert len(frac) == 2


class TestFlowsCsv:
    def test_round_trip(self, gas_network, tmp_path):
        report = solve_node_loop(gas_network, SolverConfig())
        path = tmp_path / "flows.csv"
        write_flows_csv(report.final_flows, path)
        back = read_flows_csv(path)
        for pid, q in report.final_flows.as_m3h().items():
            assert back[pid] == pytest.approx(q, abs=1e-5)

    def test_header_required(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(NetworkFileError, match="pipe,flow_m3h"):
            read_flows_csv(path)
