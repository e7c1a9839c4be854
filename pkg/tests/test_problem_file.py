import numpy as np
import pytest

from hyperproj.errors import DimensionMismatchError, ProblemFileParseError
from hyperproj.problem_file import (
    EXAMPLES,
    ProblemKind,
    example_problem,
    format_problem,
    load_problem,
    parse_problem,
    random_problem,
)

PARALLEL_LINES = """\
# two parallel lines
kind affine_hyperplane
dim 2
point 0 0
span 1 0
hyperplane 0 1 = 1   # x2 = 1
query 4 9
"""

def assert_same_problem(first, second):
    assert first.kind is second.kind
    assert first.dim == second.dim
    for attribute in ("point", "query"):
        a, b = getattr(first, attribute), getattr(second, attribute)
        assert (a is None) == (b is None)
        if a is not None:
            assert np.array_equal(a, b)
    assert len(first.spans) == len(second.spans)
    for a, b in zip(first.spans, second.spans):
        assert np.array_equal(a, b)
    for name in ("hyperplanes", "rows"):
        planes, others = getattr(first, name), getattr(second, name)
        assert len(planes) == len(others)
        for a, b in zip(planes, others):
            assert np.array_equal(a.normal, b.normal)
            assert a.offset == b.offset

def test_parse_affine_hyperplane():
    problem = parse_problem(PARALLEL_LINES)
    assert problem.kind is ProblemKind.AFFINE_HYPERPLANE
    assert problem.dim == 2
    assert np.array_equal(problem.point, [0.0, 0.0])
    assert len(problem.spans) == 1
    assert np.array_equal(problem.hyperplanes[0].normal, [0.0, 1.0])
    assert problem.hyperplanes[0].offset == 1.0
    assert np.array_equal(problem.query, [4.0, 9.0])
    assert problem.affine_subspace().dim == 1

def test_parse_linear_system_without_query():
    problem = parse_problem("kind linear_system\ndim 3\nrow 1 0 0 = 1\nrow 0 1 0 = 2.5e0\n")
    matrix, rhs = problem.linear_system()
    assert np.array_equal(matrix, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    assert np.array_equal(rhs, [1.0, 2.5])
    assert problem.query is None

def test_two_hyperplanes_affine_subspace():
    problem = example_problem("coordinate-planes")
    subspace = problem.affine_subspace()
    assert subspace.dim == 2
    assert np.allclose(subspace.anchor, 0.0)

@pytest.mark.parametrize("text, line_number, field", [
    ("dim 2\npoint 0 0\n", 2, "point"),
    ("kind affine_hyperplane\nkind affine_hyperplane\n", 2, "kind"),
    ("kind circle\n", 1, "kind"),
    ("kind linear_system\ndim 0\n", 2, "dim"),
    ("kind linear_system\ndim two\n", 2, "dim"),
    ("kind linear_system\ndim 2\nrow 1 x = 1\n", 3, "row"),
    ("kind linear_system\ndim 2\nrow 1 0 1\n", 3, "row"),
    ("kind linear_system\ndim 2\nrow 1 0 = nan\n", 3, "row"),
    ("kind linear_system\ndim 2\nrow 0 0 = 1\n", 3, "row"),
    ("kind linear_system\ndim 2\npoint 1 0\n", 3, "point"),
    ("kind linear_system\ndim 2\nquery 1 0\n", 3, "row"),
    ("kind linear_system\ndim 2\nrow 1 0 = 1\nfrobnicate\n", 4, "frobnicate"),
    ("kind two_hyperplanes\ndim 2\nhyperplane 1 0 = 0\nquery 1 1\n", 4, "hyperplane"),
    ("kind two_hyperplanes\ndim 1\nhyperplane 1 = 0\nhyperplane 1 = 1\nhyperplane 1 = 2\nquery 0\n", 5, "hyperplane"),
    ("kind linear_system\nrow 1 0 = 1\n", 2, "row"),
])
def test_parse_errors(text, line_number, field):
    with pytest.raises(ProblemFileParseError) as e:
        parse_problem(text)
    assert e.value.line_number == line_number
    assert e.value.field == field

def test_parse_dimension_mismatch():
    with pytest.raises(DimensionMismatchError) as e:
        parse_problem("kind two_hyperplanes\ndim 3\nhyperplane 1 0 = 0\n")
    assert e.value.expected == 3
    assert e.value.actual == 2
    assert "line 3" in str(e.value)

@pytest.mark.parametrize("name", sorted(EXAMPLES))
def test_examples_read_back(name):
    problem = example_problem(name)
    assert_same_problem(parse_problem(format_problem(problem)), problem)

def test_random_problems_read_back():
    for kind in ProblemKind:
        for seed in range(5):
            problem = random_problem(kind, dim=6, seed=seed)
            assert_same_problem(parse_problem(format_problem(problem)), problem)

def test_random_problem_is_seeded():
    first = random_problem(ProblemKind.LINEAR_SYSTEM, dim=4, seed=11, count=3)
    assert len(first.rows) == 3
    assert format_problem(first) == format_problem(random_problem(ProblemKind.LINEAR_SYSTEM, dim=4, seed=11, count=3))

def test_load_problem(tmp_path):
    path = tmp_path / "lines.txt"
    path.write_text(PARALLEL_LINES, encoding="utf-8")
    assert_same_problem(load_problem(path), parse_problem(PARALLEL_LINES))
