"""End-to-end checks of the command line: files, formats, and exit codes."""

import csv
import json
import xml.etree.ElementTree as ET

import pytest

from tandemroute.cli import CSV_COLUMNS, main
from tandemroute.datasets import build_instance
from tandemroute.model import format_instance_text

SMALL_INSTANCE = """\
/* eight customers on a ring */
2.0
6.0
9
5.0 5.0
9.0 5.0
8.0 8.0
5.0 9.0
2.0 8.0
1.0 5.0
2.0 2.0
5.0 1.0
8.0 2.0
"""

TINY_CONFIG = "generations = 40\npopulation_size = 30\n"


@pytest.fixture
def workdir(tmp_path):
    (tmp_path / "ring.txt").write_text(SMALL_INSTANCE)
    (tmp_path / "tiny.cfg").write_text(TINY_CONFIG)
    return tmp_path


def solve_args(workdir, out_name, *extra):
    return [
        "solve", str(workdir / "ring.txt"),
        "--config", str(workdir / "tiny.cfg"),
        "--runs", "3", "--seed", "11",
        "--out", str(workdir / out_name),
        *extra,
    ]


class TestSolve:
    def test_writes_all_report_files(self, workdir, capsys):
        assert main(solve_args(workdir, "rep")) == 0
        out = workdir / "rep"
        names = sorted(p.name for p in out.iterdir())
        assert names == [
            "ring_vrpdi_best.json",
            "ring_vrpdi_best.svg",
            "ring_vrpdi_run01.json",
            "ring_vrpdi_run02.json",
            "ring_vrpdi_run03.json",
            "ring_vrpdi_summary.csv",
        ]
        assert "ring vrpdi: best time" in capsys.readouterr().out

    def test_summary_has_the_fixed_columns(self, workdir):
        main(solve_args(workdir, "rep"))
        with open(workdir / "rep" / "ring_vrpdi_summary.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == list(CSV_COLUMNS)
        assert len(rows) == 2
        record = dict(zip(rows[0], rows[1]))
        assert record["dataset"] == "ring"
        assert record["mode"] == "vrpdi"
        assert record["runs"] == "3" and record["seed"] == "11"
        assert float(record["best_time"]) <= float(record["mean_time"])

    def test_best_json_carries_report_and_schedule(self, workdir):
        main(solve_args(workdir, "rep"))
        payload = json.loads((workdir / "rep" / "ring_vrpdi_best.json").read_text())
        assert payload["report"]["instance"] == "ring"
        assert "wall_seconds" not in payload["report"]
        assert payload["schedule"]["system_time"] == payload["report"]["objective"]
        run1 = json.loads((workdir / "rep" / "ring_vrpdi_run01.json").read_text())
        assert payload["report"]["objective"] <= run1["objective"]

    def test_best_svg_is_valid_xml(self, workdir):
        main(solve_args(workdir, "rep"))
        root = ET.fromstring((workdir / "rep" / "ring_vrpdi_best.svg").read_text())
        assert root.tag.endswith("svg")

    def test_reruns_are_byte_identical(self, workdir):
        main(solve_args(workdir, "rep_a"))
        main(solve_args(workdir, "rep_b"))
        for name in ("ring_vrpdi_summary.csv", "ring_vrpdi_best.json",
                     "ring_vrpdi_run02.json", "ring_vrpdi_best.svg"):
            a = (workdir / "rep_a" / name).read_bytes()
            b = (workdir / "rep_b" / name).read_bytes()
            assert a == b, name

    def test_worker_count_does_not_change_the_bytes(self, workdir):
        main(solve_args(workdir, "rep_serial", "--jobs", "1"))
        main(solve_args(workdir, "rep_forked", "--jobs", "2"))
        for name in ("ring_vrpdi_summary.csv", "ring_vrpdi_best.json"):
            assert (workdir / "rep_serial" / name).read_bytes() == (
                workdir / "rep_forked" / name
            ).read_bytes()

    def test_vrp_mode_flag(self, workdir):
        assert main(solve_args(workdir, "rep", "--mode", "vrp")) == 0
        summary = (workdir / "rep" / "ring_vrp_summary.csv").read_text()
        assert ",vrp," in summary

    def test_drone_fraction_flag(self, workdir):
        assert main(solve_args(workdir, "rep", "--max-drone-fraction", "0.6")) == 0

    def test_registry_name_resolves_without_files(self, tmp_path, workdir):
        args = [
            "solve", "Uniform-71-n50",
            "--config", str(workdir / "tiny.cfg"),
            "--runs", "1", "--seed", "0",
            "--out", str(tmp_path / "rep"),
        ]
        assert main(args) == 0
        assert (tmp_path / "rep" / "Uniform-71-n50_vrpdi_summary.csv").exists()


class TestExitCodes:
    def test_missing_instance_file(self, tmp_path, capsys):
        code = main(["solve", str(tmp_path / "gone.txt"), "--out", str(tmp_path)])
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_unparseable_instance(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("1.0\nnot-a-number\n")
        assert main(["solve", str(bad), "--out", str(tmp_path)]) == 2

    def test_unknown_config_key(self, workdir, capsys):
        (workdir / "bad.cfg").write_text("warp_speed = 9\n")
        code = main([
            "solve", str(workdir / "ring.txt"),
            "--config", str(workdir / "bad.cfg"),
            "--out", str(workdir / "rep"),
        ])
        assert code == 2
        assert "warp_speed" in capsys.readouterr().err

    def test_infeasible_pair_count(self, workdir, capsys):
        code = main(solve_args(workdir, "rep", "--pairs", "20"))
        assert code == 1
        assert "pairs" in capsys.readouterr().err

    def test_bad_fraction(self, workdir):
        assert main(solve_args(workdir, "rep", "--max-drone-fraction", "-1")) == 2

    def test_unknown_mode_is_a_usage_error(self, workdir):
        with pytest.raises(SystemExit) as exc:
            main(solve_args(workdir, "rep", "--mode", "teleport"))
        assert exc.value.code == 2


class TestCompare:
    def test_reports_improvement_and_verdict(self, workdir, capsys):
        code = main([
            "compare", str(workdir / "ring.txt"),
            "--config", str(workdir / "tiny.cfg"),
            "--runs", "6", "--seed", "2",
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "vrpdi vs vrp" in out
        assert "improvement over vrp: time " in out
        assert "Mann-Whitney Time" in out and "Mann-Whitney Distance" in out
        assert "Win for vrpdi" in out

    def test_same_mode_debug_flag_draws(self, workdir, capsys):
        code = main([
            "compare", str(workdir / "ring.txt"),
            "--config", str(workdir / "tiny.cfg"),
            "--runs", "4", "--seed", "2", "--same-mode",
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "time 0.0%" in out
        assert out.count("Draw for vrpdi") == 2


class TestBench:
    @pytest.fixture
    def bench_dir(self, tmp_path):
        data = tmp_path / "data"
        data.mkdir()
        instance = build_instance("Uniform-71-n50")
        (data / "Uniform-71-n50.txt").write_text(format_instance_text(instance))
        return data

    def bench_args(self, bench_dir, workdir, *extra):
        return [
            "bench", str(bench_dir),
            "--config", str(workdir / "tiny.cfg"),
            "--runs", "1", "--seed", "0",
            *extra,
        ]

    def test_modes_table_prints_ours_and_reference(self, bench_dir, workdir, capsys):
        assert main(self.bench_args(bench_dir, workdir)) == 0
        captured = capsys.readouterr()
        assert "Uniform-71-n50   ours" in captured.out
        assert "58.61" in captured.out and "37.63" in captured.out
        # the nine absent datasets are reported but do not fail the run
        assert "missing instance files:" in captured.err
        assert "Uniform-6-n500" in captured.err

    def test_capped_table_prints_reference_values(self, bench_dir, workdir, capsys):
        args = self.bench_args(bench_dir, workdir, "--table", "max-drone-distance")
        assert main(args) == 0
        out = capsys.readouterr().out
        assert "187.06" in out and "36.70" in out and "38.17" in out

    def test_empty_directory_is_a_usage_error(self, tmp_path, capsys):
        empty = tmp_path / "none"
        empty.mkdir()
        assert main(["bench", str(empty)]) == 2
        assert "no benchmark instance files" in capsys.readouterr().err

    def test_directory_defaults_to_the_environment(self, bench_dir, workdir,
                                                   monkeypatch):
        monkeypatch.setenv("TANDEMROUTE_DATA", str(bench_dir))
        args = ["bench", "--config", str(workdir / "tiny.cfg"),
                "--runs", "1", "--seed", "0"]
        assert main(args) == 0

    def test_no_directory_anywhere_is_a_usage_error(self, monkeypatch, capsys):
        monkeypatch.delenv("TANDEMROUTE_DATA", raising=False)
        assert main(["bench"]) == 2
        assert "TANDEMROUTE_DATA" in capsys.readouterr().err


class TestDataDirFallback:
    def test_relative_instance_resolves_through_the_environment(
        self, tmp_path, workdir, monkeypatch
    ):
        data = tmp_path / "pool"
        data.mkdir()
        (data / "ring.txt").write_text(SMALL_INSTANCE)
        monkeypatch.setenv("TANDEMROUTE_DATA", str(data))
        monkeypatch.chdir(tmp_path)
        args = [
            "solve", "ring.txt",
            "--config", str(workdir / "tiny.cfg"),
            "--runs", "1", "--seed", "5",
            "--out", str(tmp_path / "rep"),
        ]
        assert main(args) == 0
        assert (tmp_path / "rep" / "ring_vrpdi_summary.csv").exists()
