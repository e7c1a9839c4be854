import io

import numpy as np
import pytest

from hyperproj.cli import ExitCode, main
from hyperproj.problem_file import example_problem, format_problem

from .mock_config import set_experiment

def write_example(tmp_path, name):
    path = tmp_path / f"{name}.txt"
    path.write_text(format_problem(example_problem(name)), encoding="utf-8")
    return str(path)

def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()

def report(text):
    fields = {}
    for line in text.splitlines():
        name, _, value = line.partition(": ")
        fields[name] = value
    return fields

def numbers(value):
    return np.array([float(token) for token in value.split()])

def experiment_args(out, iters="3"):
    return ("experiment", "--rows", "3", "--cols", "8", "--instances", "2", "--starts", "2", "--iters", iters, "--seed", "5", "--processes", "2", "--out", str(out))

def test_project_two_hyperplanes(tmp_path):
    code, text = run("project", write_example(tmp_path, "coordinate-planes"))
    assert code == ExitCode.OK
    fields = report(text)
    assert fields["kind"] == "two_hyperplanes"
    assert fields["case"] == "Transversal"
    assert np.allclose(numbers(fields["point"]), [0.0, 0.0, 5.0])
    assert float(fields["determinant"]) == 1.0

def test_project_transversal(tmp_path):
    fields = report(run("project", write_example(tmp_path, "transversal"))[1])
    assert fields["case"] == "Transversal"
    assert np.allclose(numbers(fields["point"]), [1.0, 0.0, 0.0])
    assert "gap" not in fields

def test_project_parallel_lines(tmp_path):
    code, text = run("project", write_example(tmp_path, "parallel-lines"))
    assert code == ExitCode.OK
    fields = report(text)
    assert fields["case"] == "DegenerateInconsistent"
    assert np.allclose(numbers(fields["point"]), [4.0, 0.0])
    assert float(fields["gap_norm"]) == pytest.approx(1.0)

def test_project_infeasible_system(tmp_path):
    code, text = run("project", write_example(tmp_path, "contradictory-rows"))
    assert code == ExitCode.OK
    fields = report(text)
    assert fields["status"] == "infeasible"
    assert float(fields["residual"]) == pytest.approx(np.sqrt(0.5))

def test_project_feasible_system(tmp_path):
    fields = report(run("project", write_example(tmp_path, "vertical-line"))[1])
    assert fields["status"] == "feasible"
    assert fields["solution_dim"] == "1"
    assert np.allclose(numbers(fields["anchor"]), [2.0, 0.0])
    assert np.allclose(numbers(fields["point"]), [2.0, 7.0])

@pytest.mark.parametrize("name, gap, status", [
    ("parallel-lines", [0.0, 1.0], "disjoint"),
    ("scaled-gap", [0.0, 3.0], "disjoint"),
    ("transversal", [0.0, 0.0, 0.0], "intersecting"),
    ("contained-line", [0.0, 0.0], "intersecting"),
])
def test_gap(tmp_path, name, gap, status):
    code, text = run("gap", write_example(tmp_path, name))
    assert code == ExitCode.OK
    fields = report(text)
    assert np.allclose(numbers(fields["gap"]), gap)
    assert float(fields["gap_norm"]) == pytest.approx(np.linalg.norm(gap))
    assert fields["status"] == status

def test_classify(tmp_path):
    fields = report(run("classify", write_example(tmp_path, "coordinate-planes"))[1])
    assert fields["pair"] == "Transversal"

def test_classify_needs_two_hyperplanes(tmp_path, capsys):
    code, _ = run("classify", write_example(tmp_path, "parallel-lines"))
    assert code == ExitCode.PARSE_ERROR
    assert "two_hyperplanes" in capsys.readouterr().err

def test_missing_file(tmp_path):
    assert run("project", str(tmp_path / "nope.txt"))[0] == ExitCode.PARSE_ERROR

def test_malformed_file(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("kind linear_system\ndim 2\nrow 1 0 = \n", encoding="utf-8")
    assert run("project", str(path))[0] == ExitCode.PARSE_ERROR

def test_dimension_mismatch(tmp_path, capsys):
    path = tmp_path / "short.txt"
    path.write_text("kind two_hyperplanes\ndim 3\nhyperplane 1 0 = 0\n", encoding="utf-8")
    assert run("project", str(path))[0] == ExitCode.DIMENSION_MISMATCH
    assert "line 3" in capsys.readouterr().err

def test_invalid_tolerance(tmp_path):
    assert run("project", "--tol-rank", "0", write_example(tmp_path, "transversal"))[0] == ExitCode.PARSE_ERROR

def test_tolerance_override(tmp_path):
    path = tmp_path / "nearly.txt"
    path.write_text("kind affine_hyperplane\ndim 2\npoint 0 0\nspan 1 0\nhyperplane 1e-7 1 = 1\nquery 0 0\n", encoding="utf-8")
    assert report(run("project", str(path))[1])["case"] == "Transversal"
    assert report(run("project", "--tol-rank", "1e-5", str(path))[1])["case"] == "DegenerateInconsistent"

def test_experiment_zero_iterations(tmp_path):
    out = tmp_path / "zero.csv"
    code, text = run(*experiment_args(out, iters="0"))
    assert code == ExitCode.OK
    assert out.read_text(encoding="utf-8") == "iteration,median_db_single,median_db_paired\n0,0.0000000000000000e+00,0.0000000000000000e+00\n"
    assert report(text)["iterations"] == "0"

def test_experiment_is_byte_identical(tmp_path):
    first, second = tmp_path / "first.csv", tmp_path / "second.csv"
    assert run(*experiment_args(first))[0] == ExitCode.OK
    assert run(*experiment_args(second))[0] == ExitCode.OK
    assert first.read_bytes() == second.read_bytes()
    assert len(first.read_bytes().splitlines()) == 5

def test_experiment_unwritable_output(tmp_path):
    assert run(*experiment_args(tmp_path / "missing" / "out.csv"))[0] == ExitCode.OUTPUT_ERROR

def test_experiment_invalid_config(tmp_path):
    args = list(experiment_args(tmp_path / "out.csv"))
    args[args.index("--rows") + 1] = "9"
    assert run(*args)[0] == ExitCode.PARSE_ERROR

def test_example_to_stdout():
    code, text = run("example", "parallel-lines")
    assert code == ExitCode.OK
    assert text == format_problem(example_problem("parallel-lines"))

def test_example_to_file(tmp_path):
    path = tmp_path / "random.txt"
    assert run("example", "--random", "two_hyperplanes", "--dim", "4", "--seed", "3", "--out", str(path))[0] == ExitCode.OK
    fields = report(run("classify", str(path))[1])
    assert fields["pair"] in ("Identical", "ParallelDistinct", "Transversal")

def test_unknown_example():
    assert run("example", "no-such-example")[0] == ExitCode.PARSE_ERROR
    assert run("example")[0] == ExitCode.PARSE_ERROR

def test_project_point_nearly_inside_span(tmp_path):
    path = tmp_path / "far.txt"
    path.write_text("kind affine_hyperplane\ndim 2\npoint 1e9 1e9\nspan 1 1.0000001\nhyperplane 1 0 = 1\nquery 0 0\n", encoding="utf-8")
    code, text = run("project", str(path))
    assert code == ExitCode.OK
    assert report(text)["case"] == "Transversal"

def test_experiment_seed_from_config(tmp_path, set_experiment):
    set_experiment("seed", 9)
    args = list(experiment_args(tmp_path / "configured.csv"))
    seed_at = args.index("--seed")
    del args[seed_at:seed_at + 2]
    assert run(*args)[0] == ExitCode.OK
    assert run(*experiment_args(tmp_path / "explicit.csv"))[0] == ExitCode.OK
    explicit_nine = list(experiment_args(tmp_path / "nine.csv"))
    explicit_nine[explicit_nine.index("--seed") + 1] = "9"
    assert run(*explicit_nine)[0] == ExitCode.OK
    assert (tmp_path / "configured.csv").read_bytes() == (tmp_path / "nine.csv").read_bytes()
    assert (tmp_path / "configured.csv").read_bytes() != (tmp_path / "explicit.csv").read_bytes()

def test_experiment_checks_output_before_running(tmp_path, monkeypatch):
    def fail(*args, **kwargs):
        raise AssertionError("experiment ran")
    monkeypatch.setattr("hyperproj.cli.run_experiment", fail)
    assert run(*experiment_args(tmp_path / "missing" / "out.csv"))[0] == ExitCode.OUTPUT_ERROR
