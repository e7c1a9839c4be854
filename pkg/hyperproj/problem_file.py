"""Line-oriented problem files.

Grammar (one statement per line, '#' starts a comment, blank lines are
ignored, numbers are decimal):

    kind <affine_hyperplane|two_hyperplanes|linear_system>
    dim <n>
    point <n numbers>                  affine_hyperplane: a point of A
    span <n numbers>                   affine_hyperplane: zero or more
    hyperplane <n numbers> = <number>  one (affine_hyperplane) or two (two_hyperplanes)
    row <n numbers> = <number>         linear_system: one or more
    query <n numbers>                  the point to project; optional for linear_system

`kind` and `dim` must come before any vector statement. format_problem
writes the same grammar with 17 significant digits, so reading back what it
wrote gives the same doubles.
"""
import dataclasses
import enum
import math
import pathlib
import typing

import numpy as np

from hyperproj.errors import DimensionMismatchError, HyperprojError, ProblemFileParseError
from hyperproj.geometry import (
    AffineSubspace,
    Hyperplane,
    Matrix,
    Tolerances,
    Vector,
    affine_from_point_basis,
    as_vector,
)

class ProblemKind(enum.Enum):
    AFFINE_HYPERPLANE = "affine_hyperplane"
    TWO_HYPERPLANES = "two_hyperplanes"
    LINEAR_SYSTEM = "linear_system"

@dataclasses.dataclass(frozen=True, eq=False)
class ProblemFile:
    kind: ProblemKind
    dim: int
    point: typing.Optional[Vector] = None
    spans: typing.Tuple[Vector, ...] = ()
    hyperplanes: typing.Tuple[Hyperplane, ...] = ()
    rows: typing.Tuple[Hyperplane, ...] = ()
    query: typing.Optional[Vector] = None

    def affine_subspace(self, tol: typing.Optional[Tolerances] = None) -> AffineSubspace:
        """A: point + span(spans) for affine_hyperplane problems, H1 for
        two_hyperplanes problems.
        """
        if self.kind is ProblemKind.TWO_HYPERPLANES:
            return self.hyperplanes[0].as_affine(tol)
        return affine_from_point_basis(self.point, self.spans, tol)

    def linear_system(self) -> typing.Tuple[Matrix, Vector]:
        matrix = np.array([row.normal for row in self.rows])
        rhs = np.array([row.offset for row in self.rows])
        return matrix, rhs

# Statement keyword -> the problem kinds allowing it, and how many times.
_ALLOWED_COUNTS: typing.Dict[str, typing.Dict[ProblemKind, typing.Tuple[int, typing.Optional[int]]]] = {
    "point": {ProblemKind.AFFINE_HYPERPLANE: (1, 1)},
    "span": {ProblemKind.AFFINE_HYPERPLANE: (0, None)},
    "hyperplane": {ProblemKind.AFFINE_HYPERPLANE: (1, 1), ProblemKind.TWO_HYPERPLANES: (2, 2)},
    "row": {ProblemKind.LINEAR_SYSTEM: (1, None)},
    "query": {ProblemKind.AFFINE_HYPERPLANE: (1, 1), ProblemKind.TWO_HYPERPLANES: (1, 1), ProblemKind.LINEAR_SYSTEM: (0, 1)},
}
_EQUATION_KEYWORDS = ("hyperplane", "row")

class _Statement(typing.NamedTuple):
    line_number: int
    keyword: str
    vector: Vector
    rhs: typing.Optional[float]

def _parse_number(token: str, line_number: int, field: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ProblemFileParseError(line_number, field, f"not a number: {token!r}")
    if not math.isfinite(value):
        raise ProblemFileParseError(line_number, field, f"not a finite number: {token!r}")
    return value

def _parse_vector(tokens: typing.List[str], dim: int, line_number: int, field: str) -> Vector:
    if len(tokens) != dim:
        raise DimensionMismatchError(dim, len(tokens), context=f"line {line_number}: {field}")
    return as_vector([_parse_number(token, line_number, field) for token in tokens], name=field)

def _parse_positive_int(tokens: typing.List[str], line_number: int, field: str) -> int:
    if len(tokens) != 1:
        raise ProblemFileParseError(line_number, field, "expected exactly one value")
    try:
        value = int(tokens[0])
    except ValueError:
        raise ProblemFileParseError(line_number, field, f"not an integer: {tokens[0]!r}")
    if value < 1:
        raise ProblemFileParseError(line_number, field, f"must be positive, got {value}")
    return value

def parse_problem(text: str) -> ProblemFile:
    kind: typing.Optional[ProblemKind] = None
    dim: typing.Optional[int] = None
    statements: typing.List[_Statement] = []
    last_line_number = 0

    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        last_line_number = line_number
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, *tokens = line.split()
        if keyword == "kind":
            if kind is not None:
                raise ProblemFileParseError(line_number, keyword, "kind given twice")
            if len(tokens) != 1:
                raise ProblemFileParseError(line_number, keyword, "expected exactly one value")
            try:
                kind = ProblemKind(tokens[0])
            except ValueError:
                raise ProblemFileParseError(line_number, keyword, f"unknown problem kind {tokens[0]!r}")
        elif keyword == "dim":
            if dim is not None:
                raise ProblemFileParseError(line_number, keyword, "dim given twice")
            dim = _parse_positive_int(tokens, line_number, keyword)
        elif keyword in _ALLOWED_COUNTS:
            if kind is None or dim is None:
                raise ProblemFileParseError(line_number, keyword, "kind and dim must come first")
            if kind not in _ALLOWED_COUNTS[keyword]:
                raise ProblemFileParseError(line_number, keyword, f"not allowed in a {kind.value} problem")
            rhs = None
            if keyword in _EQUATION_KEYWORDS:
                if tokens.count("=") != 1 or tokens.index("=") != len(tokens) - 2:
                    raise ProblemFileParseError(line_number, keyword, "expected '<coefficients> = <number>'")
                rhs = _parse_number(tokens[-1], line_number, keyword)
                tokens = tokens[:-2]
            statements.append(_Statement(line_number, keyword, _parse_vector(tokens, dim, line_number, keyword), rhs))
        else:
            raise ProblemFileParseError(line_number, keyword, "unknown statement")

    if kind is None:
        raise ProblemFileParseError(last_line_number, "kind", "missing")
    if dim is None:
        raise ProblemFileParseError(last_line_number, "dim", "missing")
    for keyword, counts in _ALLOWED_COUNTS.items():
        if kind not in counts:
            continue
        low, high = counts[kind]
        found = [statement for statement in statements if statement.keyword == keyword]
        if len(found) < low:
            raise ProblemFileParseError(last_line_number, keyword, f"a {kind.value} problem needs at least {low}")
        if high is not None and len(found) > high:
            raise ProblemFileParseError(found[high].line_number, keyword, f"a {kind.value} problem allows at most {high}")

    def equations(keyword: str) -> typing.Tuple[Hyperplane, ...]:
        planes = []
        for statement in statements:
            if statement.keyword != keyword:
                continue
            try:
                planes.append(Hyperplane(normal=statement.vector, offset=statement.rhs))
            except HyperprojError as e:
                raise ProblemFileParseError(statement.line_number, keyword, str(e))
        return tuple(planes)

    def vectors(keyword: str) -> typing.Tuple[Vector, ...]:
        return tuple(statement.vector for statement in statements if statement.keyword == keyword)

    points = vectors("point")
    queries = vectors("query")
    return ProblemFile(
        kind=kind,
        dim=dim,
        point=points[0] if points else None,
        spans=vectors("span"),
        hyperplanes=equations("hyperplane"),
        rows=equations("row"),
        query=queries[0] if queries else None,
    )

def load_problem(path: typing.Union[str, pathlib.Path]) -> ProblemFile:
    with open(path, encoding="utf-8") as f:
        return parse_problem(f.read())

def format_number(value: float) -> str:
    """17 significant digits: enough to read back the same double."""
    return f"{value:.16e}"

def format_vector(vector: typing.Iterable[float]) -> str:
    return " ".join(format_number(float(value)) for value in vector)

def format_problem(problem: ProblemFile) -> str:
    lines = [f"kind {problem.kind.value}", f"dim {problem.dim}"]
    if problem.point is not None:
        lines.append(f"point {format_vector(problem.point)}")
    lines.extend(f"span {format_vector(span)}" for span in problem.spans)
    lines.extend(f"hyperplane {format_vector(plane.normal)} = {format_number(plane.offset)}" for plane in problem.hyperplanes)
    lines.extend(f"row {format_vector(row.normal)} = {format_number(row.offset)}" for row in problem.rows)
    if problem.query is not None:
        lines.append(f"query {format_vector(problem.query)}")
    return "\n".join(lines) + "\n"

def _affine_hyperplane(point, spans, normal, offset, query) -> ProblemFile:
    return ProblemFile(
        kind=ProblemKind.AFFINE_HYPERPLANE,
        dim=len(point),
        point=as_vector(point),
        spans=tuple(as_vector(span) for span in spans),
        hyperplanes=(Hyperplane(normal=normal, offset=offset),),
        query=as_vector(query),
    )

def _two_hyperplanes(first, second, query) -> ProblemFile:
    return ProblemFile(
        kind=ProblemKind.TWO_HYPERPLANES,
        dim=len(query),
        hyperplanes=(Hyperplane(*first), Hyperplane(*second)),
        query=as_vector(query),
    )

def _linear_system(rows, query=None) -> ProblemFile:
    return ProblemFile(
        kind=ProblemKind.LINEAR_SYSTEM,
        dim=len(rows[0][0]),
        rows=tuple(Hyperplane(*row) for row in rows),
        query=None if query is None else as_vector(query),
    )

EXAMPLES: typing.Dict[str, typing.Callable[[], ProblemFile]] = {
    # The plane x3 = 0 against x1 + x3 = 1; the nearest point to 0 is (1,0,0).
    "transversal": lambda: _affine_hyperplane((0, 0, 0), [(1, 0, 0), (0, 1, 0)], (1, 0, 1), 1, (0, 0, 0)),
    # The line x2 = 0 inside the hyperplane x2 = 0.
    "contained-line": lambda: _affine_hyperplane((0, 0), [(1, 0)], (0, 1), 0, (4, 9)),
    # Parallel lines at distance 1.
    "parallel-lines": lambda: _affine_hyperplane((0, 0), [(1, 0)], (0, 1), 1, (4, 9)),
    # Parallel lines at distance 3, with an unnormalized normal.
    "scaled-gap": lambda: _affine_hyperplane((0, 0), [(1, 0)], (0, 2), 6, (4, 9)),
    "coordinate-planes": lambda: _two_hyperplanes(((1, 0, 0), 0), ((0, 1, 0), 0), (3, 4, 5)),
    "vertical-line": lambda: _linear_system([((1, 0), 2)], query=(5, 7)),
    "contradictory-rows": lambda: _linear_system([((1, 0), 0), ((1, 0), 1)], query=(5, 7)),
}

def example_problem(name: str) -> ProblemFile:
    return EXAMPLES[name]()

def random_problem(kind: ProblemKind, dim: int, seed: int, count: typing.Optional[int] = None) -> ProblemFile:
    """A problem with iid standard normal data, reproducible from seed.

    count fixes the number of span vectors (affine_hyperplane) or rows
    (linear_system).
    """
    rng = np.random.default_rng(seed)
    if kind is ProblemKind.AFFINE_HYPERPLANE:
        span_count = count if count is not None else int(rng.integers(0, dim + 1))
        return _affine_hyperplane(
            rng.standard_normal(dim),
            list(rng.standard_normal((span_count, dim))),
            rng.standard_normal(dim),
            float(rng.standard_normal()),
            rng.standard_normal(dim),
        )
    if kind is ProblemKind.TWO_HYPERPLANES:
        return _two_hyperplanes(
            (rng.standard_normal(dim), float(rng.standard_normal())),
            (rng.standard_normal(dim), float(rng.standard_normal())),
            rng.standard_normal(dim),
        )
    row_count = count if count is not None else max(1, dim // 2)
    matrix = rng.standard_normal((row_count, dim))
    rhs = matrix @ rng.standard_normal(dim)
    return _linear_system(list(zip(matrix, rhs)), query=rng.standard_normal(dim))
