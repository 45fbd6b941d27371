import csv
import json

import pytest

from paretolab.analysis import DECISION_TABLE_COLUMNS, TABLE1_COLUMNS
from paretolab.cli import main
from paretolab.traces import read_traces


def run_cli(args):
    """Invoke the CLI in-process; returns the exit code (0 if it returned)."""
    try:
        main(args)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    return 0


class TestSimulate:
    def test_tiny_run_writes_log(self, tmp_path):
        out = tmp_path / "log.ndjson"
        code = run_cli(["simulate", "--policy", "UniformRandom", "--agents", "1",
                        "--problems", "branin", "--budget", "5", "--seed", "1",
                        "--out", str(out)])
        assert code == 0
        traces = read_traces(out)
        assert len(traces) == 1 and len(traces[0]) == 5

    def test_same_seed_identical_bytes(self, tmp_path):
        a, b = tmp_path / "a.ndjson", tmp_path / "b.ndjson"
        args = ["simulate", "--policy", "UniformRandom", "--agents", "2",
                "--problems", "ackley,branin", "--budget", "4", "--seed", "7"]
        assert run_cli(args + ["--out", str(a)]) == 0
        assert run_cli(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_fourteen_agents_ten_problems_arithmetic(self, tmp_path):
        out = tmp_path / "log.ndjson"
        code = run_cli(["simulate", "--policy", "UniformRandom", "--agents", "14",
                        "--budget", "20", "--seed", "0", "--out", str(out)])
        assert code == 0
        traces = read_traces(out)
        assert len(traces) == 140
        assert sum(len(t) for t in traces) == 2800

    def test_ei_agent_full_trace(self, tmp_path):
        out = tmp_path / "log.ndjson"
        code = run_cli(["simulate", "--policy", "EIMax", "--agents", "1",
                        "--problems", "branin", "--budget", "20",
                        "--grid", "15x15", "--seed", "3", "--out", str(out)])
        assert code == 0
        traces = read_traces(out)
        assert len(traces[0]) == 20

    def test_unknown_policy_exit_code_1(self, tmp_path):
        code = run_cli(["simulate", "--policy", "Wat", "--out",
                        str(tmp_path / "x.ndjson")])
        assert code == 1


class TestAnalyze:
    @pytest.fixture
    def log(self, tmp_path):
        out = tmp_path / "log.ndjson"
        run_cli(["simulate", "--policy", "UniformRandom", "--agents", "1",
                 "--problems", "branin", "--budget", "6", "--seed", "2",
                 "--out", str(out)])
        return out

    def test_decision_table_schema_and_counts(self, log, tmp_path):
        out_dir = tmp_path / "reports"
        code = run_cli(["analyze", "--in", str(log), "--out", str(out_dir),
                        "--grid", "6x6"])
        assert code == 0
        with open(out_dir / "decision_table.csv") as fh:
            reader = csv.reader(fh)
            header = tuple(next(reader))
            rows = list(reader)
        assert header == DECISION_TABLE_COLUMNS
        assert len(rows) == (6 - 3) * 3
        assert (out_dir / "decision_table_wide.csv").exists()

    def test_rerun_byte_identical(self, log, tmp_path):
        d1, d2 = tmp_path / "r1", tmp_path / "r2"
        args = ["analyze", "--in", str(log), "--grid", "6x6"]
        assert run_cli(args + ["--out", str(d1)]) == 0
        assert run_cli(args + ["--out", str(d2)]) == 0
        assert (d1 / "decision_table.csv").read_bytes() == \
               (d2 / "decision_table.csv").read_bytes()

    def test_missing_input_exit_1(self, tmp_path):
        code = run_cli(["analyze", "--in", str(tmp_path / "absent.ndjson"),
                        "--out", str(tmp_path / "r")])
        assert code == 1

    def test_too_short_traces_exit_1(self, tmp_path):
        out = tmp_path / "log.ndjson"
        run_cli(["simulate", "--policy", "UniformRandom", "--agents", "1",
                 "--problems", "branin", "--budget", "3", "--out", str(out)])
        code = run_cli(["analyze", "--in", str(out), "--out", str(tmp_path / "r")])
        assert code == 1


class TestReport:
    def test_report_outputs(self, tmp_path):
        log = tmp_path / "log.ndjson"
        run_cli(["simulate", "--policy", "UniformRandom", "--agents", "2",
                 "--problems", "branin,ackley", "--budget", "6", "--seed", "4",
                 "--out", str(log)])
        table_dir = tmp_path / "t"
        run_cli(["analyze", "--in", str(log), "--out", str(table_dir), "--grid", "6x6"])
        out_dir = tmp_path / "r"
        code = run_cli(["report", "--table", str(table_dir / "decision_table.csv"),
                        "--in", str(log), "--out", str(out_dir)])
        assert code == 0
        expected = ["counts_by_player.csv", "counts_by_problem.csv",
                    "pct_histogram_by_player.csv", "pct_histogram_by_problem.csv",
                    "run_lengths_by_player.csv", "run_lengths_by_problem.csv",
                    "run_length_histogram.csv", "distance_series.csv",
                    "table1_sigma.csv", "table1_entropy.csv", "table1_distance.csv",
                    "table1_sigma.json", "boxplot_sigma.csv"]
        for name in expected:
            assert (out_dir / name).exists(), name
        with open(out_dir / "table1_sigma.csv") as fh:
            header = tuple(next(csv.reader(fh)))
        assert header == TABLE1_COLUMNS

    def test_missing_table_exit_1(self, tmp_path):
        code = run_cli(["report", "--table", str(tmp_path / "no.csv"),
                        "--in", str(tmp_path / "no.ndjson"),
                        "--out", str(tmp_path / "r")])
        assert code == 1


class TestProblemsCommand:
    def test_catalog_json(self, capsys):
        assert run_cli(["problems"]) == 0
        catalog = json.loads(capsys.readouterr().out)
        assert len(catalog) == 10
        assert catalog[0]["problem_id"] == "ackley"


class TestUsageErrors:
    def test_unknown_command(self):
        assert run_cli(["frobnicate"]) == 1

    def test_bad_grid_spec(self, tmp_path):
        log = tmp_path / "log.ndjson"
        run_cli(["simulate", "--policy", "UniformRandom", "--agents", "1",
                 "--problems", "branin", "--budget", "4", "--out", str(log)])
        assert run_cli(["analyze", "--in", str(log), "--out", str(tmp_path / "r"),
                        "--grid", "banana"]) == 1
