"""End-to-end command-line behaviour: output contracts and exit codes."""

from __future__ import annotations

import re

import pytest

from benchlite.analysis import load_rank_fixtures
from benchlite.cli import main
from benchlite.engine import Method

RUN_LINE = re.compile(r"^run\|(\S+)\|succeeded=(\d+) failed=(\d+)$")
TARGET_LINE = re.compile(r"^(\S+)\|(Succeeded|Failed|TimedOut)\|(\d+\.\d{3})(\|.*)?$")


def run_cli(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture()
def populated_store(tmp_path, fixtures_dir):
    """A store with one full fleet run at 100 MB, seed 42."""
    store = tmp_path / "store.blt"
    code = main(
        [
            "run",
            "--mem", "100",
            "--cores", "1",
            "--inventory", str(fixtures_dir / "inventory.txt"),
            "--repository", str(store),
            "--profile", str(fixtures_dir / "mock_profile.txt"),
            "--seed", "42",
            "--run-id", "seed-run",
        ]
    )
    assert code == 0
    return store


class TestRun:
    def test_reports_duration_per_target_and_summary(self, tmp_path, fixtures_dir, capsys):
        code, out, err = run_cli(
            [
                "run",
                "--mem", "100",
                "--cores", "1",
                "--inventory", str(fixtures_dir / "inventory.txt"),
                "--repository", str(tmp_path / "s.blt"),
                "--profile", str(fixtures_dir / "mock_profile.txt"),
                "--seed", "42",
            ],
            capsys,
        )
        assert code == 0 and err == ""
        lines = out.strip().splitlines()
        target_lines, summary = lines[:-1], lines[-1]
        assert len(target_lines) == 10
        for line in target_lines:
            m = TARGET_LINE.match(line)
            assert m, line
            assert float(m.group(3)) >= 0
        m = RUN_LINE.match(summary)
        assert m and m.group(2) == "10" and m.group(3) == "0"

    def test_target_subset(self, tmp_path, fixtures_dir, capsys):
        code, out, _ = run_cli(
            [
                "run",
                "--mem", "100",
                "--cores", "1",
                "--inventory", str(fixtures_dir / "inventory.txt"),
                "--repository", str(tmp_path / "s.blt"),
                "--profile", str(fixtures_dir / "mock_profile.txt"),
                "--targets", "alpha.large,echo.large",
            ],
            capsys,
        )
        assert code == 0
        names = [l.split("|")[0] for l in out.strip().splitlines()[:-1]]
        assert names == ["alpha.large", "echo.large"]

    def test_missing_inventory_exit_2_names_path(self, tmp_path, fixtures_dir, capsys):
        missing = tmp_path / "no-such-inventory.txt"
        code, out, err = run_cli(
            [
                "run",
                "--mem", "100",
                "--cores", "1",
                "--inventory", str(missing),
                "--repository", str(tmp_path / "s.blt"),
                "--profile", str(fixtures_dir / "mock_profile.txt"),
            ],
            capsys,
        )
        assert code == 2
        assert err.startswith("error|FileNotFound|")
        assert str(missing) in err

    def test_duplicate_run_id_is_runtime_error(self, populated_store, fixtures_dir, capsys):
        code, _, err = run_cli(
            [
                "run",
                "--mem", "100",
                "--cores", "1",
                "--inventory", str(fixtures_dir / "inventory.txt"),
                "--repository", str(populated_store),
                "--profile", str(fixtures_dir / "mock_profile.txt"),
                "--run-id", "seed-run",
            ],
            capsys,
        )
        assert code == 1
        assert err.startswith("error|RepositoryWriteFailure|")

    def test_cores_beyond_smallest_target_exit_2(self, tmp_path, fixtures_dir, capsys):
        code, _, err = run_cli(
            [
                "run",
                "--mem", "100",
                "--cores", "64",
                "--inventory", str(fixtures_dir / "inventory.txt"),
                "--repository", str(tmp_path / "s.blt"),
                "--profile", str(fixtures_dir / "mock_profile.txt"),
            ],
            capsys,
        )
        assert code == 2
        assert err.startswith("error|CoresExceedTarget|")


class TestRank:
    def test_machine_lines(self, populated_store, capsys):
        code, out, _ = run_cli(
            [
                "rank",
                "--weights", "2,0,5,0",
                "--method", "native",
                "--mem", "100",
                "--repository", str(populated_store),
                "--machine",
            ],
            capsys,
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 10
        ranks = []
        for line in lines:
            target, score, rank = line.split("|")
            float(score)
            ranks.append(int(rank))
        assert ranks == sorted(ranks) and ranks[0] == 1

    def test_human_table(self, populated_store, capsys):
        code, out, _ = run_cli(
            [
                "rank",
                "--weights", "1,1,1,1",
                "--method", "native",
                "--mem", "100",
                "--repository", str(populated_store),
            ],
            capsys,
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0].split() == ["rank", "target", "score"]
        assert len(lines) == 11

    def test_output_is_stable(self, populated_store, capsys):
        outputs = []
        for _ in range(2):
            _, out, _ = run_cli(
                [
                    "rank",
                    "--weights", "4,3,5,0",
                    "--method", "native",
                    "--mem", "100",
                    "--repository", str(populated_store),
                    "--machine",
                ],
                capsys,
            )
            outputs.append(out)
        assert outputs[0] == outputs[1]

    def test_all_zero_weights_exit_2(self, populated_store, capsys):
        code, _, err = run_cli(
            [
                "rank",
                "--weights", "0,0,0,0",
                "--method", "native",
                "--mem", "100",
                "--repository", str(populated_store),
            ],
            capsys,
        )
        assert code == 2
        assert err.startswith("error|AllZeroWeights|")

    def test_weight_out_of_range_exit_2(self, populated_store, capsys):
        code, _, err = run_cli(
            [
                "rank",
                "--weights", "6,0,0,0",
                "--method", "native",
                "--mem", "100",
                "--repository", str(populated_store),
            ],
            capsys,
        )
        assert code == 2
        assert err.startswith("error|OutOfRange|")

    def test_hybrid_without_historic_exit_1(self, populated_store, capsys):
        code, _, err = run_cli(
            [
                "rank",
                "--weights", "1,1,1,1",
                "--method", "hybrid",
                "--mem", "100",
                "--repository", str(populated_store),
            ],
            capsys,
        )
        assert code == 1
        assert err.startswith("error|InsufficientData|")
        assert "Historic" in err

    def test_missing_store_exit_2(self, tmp_path, capsys):
        code, _, err = run_cli(
            [
                "rank",
                "--weights", "1,1,1,1",
                "--method", "native",
                "--mem", "100",
                "--repository", str(tmp_path / "absent.blt"),
            ],
            capsys,
        )
        assert code == 2
        assert err.startswith("error|FileNotFound|")


class TestImportAndHybrid:
    def test_import_then_hybrid(self, populated_store, tmp_path, fixtures_dir, capsys):
        # age a copy of the seed run into a baseline under a fresh run id
        baseline = tmp_path / "baseline.blt"
        text = "\n".join(
            line.replace("run=seed-run", "run=baseline-run")
            for line in populated_store.read_text().splitlines()
            if not line.startswith("#benchlite-meta")
        )
        baseline.write_text(text + "\n")

        code, out, _ = run_cli(
            ["import", "--role", "historic", "--repository", str(populated_store), str(baseline)],
            capsys,
        )
        assert code == 0
        assert "imported|" in out
        assert out.strip().splitlines()[-1].startswith(f"import|{baseline}|runs=1")

        code, out, _ = run_cli(
            [
                "rank",
                "--weights", "4,3,5,0",
                "--method", "hybrid",
                "--mem", "100",
                "--repository", str(populated_store),
                "--machine",
            ],
            capsys,
        )
        assert code == 0
        assert len(out.strip().splitlines()) == 10

    def test_import_missing_file(self, tmp_path, capsys):
        code, _, err = run_cli(
            ["import", "--role", "historic", "--repository", str(tmp_path / "s.blt"), "ghost.blt"],
            capsys,
        )
        assert code == 2
        assert err.startswith("error|FileNotFound|")


class TestCompare:
    @pytest.fixture()
    def case1_files(self, tmp_path, fixtures_dir):
        cells = load_rank_fixtures(fixtures_dir / "published_rank_tables.txt")
        cell = next(
            c
            for c in cells
            if (c.case, c.mode, c.method, c.size_mb) == (1, "sequential", Method.NATIVE, 100)
        )
        benchmark = tmp_path / "predicted.txt"
        benchmark.write_text("".join(f"{t}|{p}\n" for t, _, p in cell.rows))
        timings = tmp_path / "timings.txt"
        timings.write_text("".join(f"{t}|{float(e)}\n" for t, e, _ in cell.rows))
        return benchmark, timings

    def test_report_summary_lines(self, case1_files, capsys):
        benchmark, timings = case1_files
        code, out, _ = run_cli(
            ["compare", "--benchmark", str(benchmark), "--empirical", str(timings)],
            capsys,
        )
        assert code == 0
        assert "summary|d_s|10" in out
        assert "summary|corr_pct|89.1" in out

    def test_csv_mode(self, case1_files, capsys):
        benchmark, timings = case1_files
        code, out, _ = run_cli(
            ["compare", "--benchmark", str(benchmark), "--empirical", str(timings), "--csv"],
            capsys,
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "target,predicted_rank,measured_rank,abs_diff"
        assert len(lines) == 11

    def test_mismatched_targets_exit_1(self, tmp_path, capsys):
        (tmp_path / "p.txt").write_text("a|1\nb|2\n")
        (tmp_path / "t.txt").write_text("a|1.0\nc|2.0\n")
        code, _, err = run_cli(
            ["compare", "--benchmark", str(tmp_path / "p.txt"), "--empirical", str(tmp_path / "t.txt")],
            capsys,
        )
        assert code == 1
        assert err.startswith("error|TargetSetMismatch|")


class TestUsage:
    def test_unknown_flag(self, capsys):
        code, _, err = run_cli(["rank", "--wieghts", "1,1,1,1"], capsys)
        assert code == 2
        assert err.startswith("error|UsageError|")

    def test_missing_subcommand(self, capsys):
        code, _, err = run_cli([], capsys)
        assert code == 2
        assert err.startswith("error|UsageError|")

    def test_bad_method_choice(self, capsys):
        code, _, err = run_cli(
            ["rank", "--weights", "1,1,1,1", "--method", "psychic", "--mem", "100",
             "--repository", "x"],
            capsys,
        )
        assert code == 2
        assert err.startswith("error|UsageError|")

    def test_malformed_weights_exit_2(self, populated_store, capsys):
        code, _, err = run_cli(
            [
                "rank",
                "--weights", "1,two,3,4",
                "--method", "native",
                "--mem", "100",
                "--repository", str(populated_store),
            ],
            capsys,
        )
        assert code == 2
        assert err.startswith("error|InvariantViolation|")
