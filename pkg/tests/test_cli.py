"""
Tests for the command-line entry point.

Commands are driven through main(argv) with files in tmp_path; stdout is read
with capsys.
"""

import json

import pytest
from cli import main
from errors import NotFinitelyDetermined, SingularGainSystem
from experiments.report import REPORT_HEADER
from qp_solver.active_set import DualActiveSetSolver
from regions.cache import RegionCache
from storage import files, run_repository


@pytest.fixture
def problem_file(tmp_path, example1_spec):
    path = tmp_path / "example1.json"
    files.write_problem(path, example1_spec)
    return path


class TestSynth:
    def test_prints_problem_size(self, problem_file, capsys):
        assert main(["synth", str(problem_file)]) == 0
        assert capsys.readouterr().out.strip() == "q=32 vars=4"

    def test_writes_artifacts_that_reload(self, problem_file, tmp_path, example1_qp):
        out = tmp_path / "artifacts"
        assert main(["synth", str(problem_file), "--out", str(out)]) == 0
        summary = json.loads((out / run_repository.SYNTHESIS_FILE).read_text())
        assert summary["q"] == 32 and summary["N"] == 4
        qp = run_repository.load_artifacts(out)
        assert qp.q == example1_qp.q
        assert qp.row_tags == example1_qp.row_tags

    def test_malformed_problem_exits_2(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(
            json.dumps(
                {
                    "A": [[1.0, 0.1], [0.0]],
                    "B": [[0.0], [1.0]],
                    "Q": [[1.0, 0.0], [0.0, 1.0]],
                    "R": [[1.0]],
                    "N": 2,
                    "x_bounds": [[-1, 1], [-1, 1]],
                    "u_bounds": [[-1, 1]],
                }
            )
        )
        assert main(["synth", str(path)]) == 2
        assert "A: row 1 has 1 columns, expected 2" in capsys.readouterr().err

    @pytest.mark.parametrize(
        "target, error",
        [
            ("synthesis.condensing.terminal_set", NotFinitelyDetermined("no fixed point")),
            ("synthesis.condensing.lqr_gain", SingularGainSystem("R + B'PB is singular")),
        ],
    )
    def test_synthesis_failure_exits_2(self, problem_file, mocker, capsys, target, error):
        mocker.patch(target, side_effect=error)
        assert main(["synth", str(problem_file)]) == 2
        assert str(error) in capsys.readouterr().err

    def test_missing_file_exits_1(self, tmp_path):
        assert main(["synth", str(tmp_path / "nope.json")]) == 1


class TestExample:
    def test_written_file_uses_lambda_key(self, tmp_path, capsys):
        path = tmp_path / "ex.json"
        assert main(["example", "example1", str(path)]) == 0
        assert "lambda" in json.loads(path.read_text())
        capsys.readouterr()
        assert main(["synth", str(path)]) == 0
        assert "q=32" in capsys.readouterr().out


class TestBatch:
    def test_same_seed_gives_identical_files(self, problem_file, tmp_path, capsys):
        outputs = []
        for name in ("a", "b"):
            out = tmp_path / name
            argv = ["batch", str(problem_file), "--mode", "suboptimal", "--lambda", "0.9"]
            assert main(argv + ["--count", "4", "--seed", "5", "--out", str(out)]) == 0
            outputs.append(out)
        first, second = outputs
        for name in (run_repository.SUMMARY_FILE, run_repository.TRAJECTORIES_FILE):
            assert (first / name).read_bytes() == (second / name).read_bytes()
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == lines[1]
        assert lines[0].startswith("suboptimal(lambda=0.9): qps=")

    def test_origin_solves_one_qp_per_trajectory(self, problem_file, tmp_path, mocker, capsys):
        spy = mocker.spy(DualActiveSetSolver, "solve")
        out = tmp_path / "origin"
        argv = ["batch", str(problem_file), "--origin", "--count", "3", "--out", str(out)]
        assert main(argv) == 0
        assert spy.call_count == 3
        report = run_repository.read_report(out)
        assert (report.qps, report.steps, report.flops, report.failures) == (3, 0, 0, 0)
        assert report.messages == 6
        assert "optimal: qps=3" in capsys.readouterr().out

    def test_saved_trajectories(self, problem_file, tmp_path):
        out = tmp_path / "saved"
        argv = ["batch", str(problem_file), "--count", "2", "--seed", "1", "--out", str(out)]
        assert main(argv + ["--save-trajectories"]) == 0
        header, rows = files.read_csv(out / "traj_00000.csv")
        assert header[:3] == ["k", "x_1", "x_2"]
        assert rows and rows[0][4] == "1"

    def test_lambda_out_of_range_exits_1(self, problem_file):
        argv = ["batch", str(problem_file), "--mode", "suboptimal", "--lambda", "1.5"]
        assert main(argv + ["--count", "1"]) == 1


class TestReport:
    def test_table_and_csv(self, problem_file, tmp_path, capsys):
        base = ["batch", str(problem_file), "--count", "3", "--seed", "2"]
        assert main(base + ["--out", str(tmp_path / "opt")]) == 0
        sub = ["--mode", "suboptimal", "--lambda", "0.9", "--out", str(tmp_path / "sub")]
        assert main(base + sub) == 0
        capsys.readouterr()

        csv_path = tmp_path / "report.csv"
        argv = ["report", str(tmp_path / "sub"), str(tmp_path / "opt"), "--csv", str(csv_path)]
        assert main(argv) == 0
        table = capsys.readouterr().out.splitlines()
        assert table[0].split()[0] == "mode"
        assert table[1].split()[0] == "optimal"
        header, rows = files.read_csv(csv_path)
        assert header == REPORT_HEADER
        assert rows[0][4:] == ["0.00", "0.00", "0.00"]
        assert rows[1][0] == "suboptimal(lambda=0.9)"

    def test_without_baseline_exits_1(self, problem_file, tmp_path):
        out = tmp_path / "sub"
        argv = ["batch", str(problem_file), "--mode", "suboptimal", "--count", "1"]
        assert main(argv + ["--out", str(out)]) == 0
        assert main(["report", str(out)]) == 1


class TestProject:
    def test_builds_cache_used_by_batch(self, problem_file, tmp_path, capsys):
        cache = tmp_path / "regions.json"
        assert main(["project", str(problem_file), str(cache), "--count", "6"]) == 0
        line = capsys.readouterr().out.strip()
        assert line.startswith("laws=")
        cached = int(line.rsplit("cached=", 1)[1])
        assert len(RegionCache.load(cache)) == cached

        argv = ["batch", str(problem_file), "--mode", "suboptimal-proj", "--count", "3"]
        assert main(argv + ["--cache", str(cache)]) == 0
        assert "suboptimal-proj(lambda=1): qps=" in capsys.readouterr().out

    def test_elimination_cap_skips_projection(self, problem_file, tmp_path, capsys):
        cache = tmp_path / "regions.json"
        argv = ["project", str(problem_file), str(cache), "--count", "6", "--elim-cap", "0"]
        assert main(argv) == 0
        assert capsys.readouterr().out.strip().endswith("cached=0")


class TestSimulate:
    def test_writes_trajectory_csv(self, problem_file, tmp_path, feasible_states, capsys):
        out = tmp_path / "traj.csv"
        x0 = [str(v) for v in feasible_states[0]]
        assert main(["simulate", str(problem_file), "--x0", *x0, "--out", str(out)]) == 0
        assert "converged=true" in capsys.readouterr().out
        header, rows = files.read_csv(out)
        assert header[-1] == "region"

    def test_wrong_state_length_exits_2(self, problem_file):
        assert main(["simulate", str(problem_file), "--x0", "0.1"]) == 2

    def test_compare_lists_every_mode(self, problem_file, feasible_states, capsys):
        x0 = [str(v) for v in feasible_states[1]]
        assert main(["compare", str(problem_file), "--x0", *x0]) == 0
        out = capsys.readouterr().out
        for mode in ("optimal", "suboptimal", "suboptimal-proj"):
            assert mode in out
