"""Vectors, hyperplanes and closed affine subspaces, with their projectors.

An affine subspace A = a0 + U is stored as its anchor a0 = P_A(0), which lies
in the orthogonal complement of U, and an orthonormal basis of U (one basis
vector per row). Then P_U(x) = sum_i <x, u_i> u_i and P_A(x) = a0 + P_U(x).

Every value type here is immutable: arrays are copied on construction and
marked read-only.
"""
import dataclasses
import logging
import math
import typing

import numpy as np

from hyperproj.config import cfg
from hyperproj.errors import (
    BasisNotOrthonormalError,
    DimensionMismatchError,
    InvalidToleranceError,
    InvalidVectorError,
    ZeroNormalError,
)

tolerances_config = cfg["tolerances"]

logger = logging.getLogger(__name__)

Vector = np.ndarray
# Two-dimensional array. Bases keep one vector per row.
Matrix = np.ndarray

def _configured_tolerance(key: str) -> typing.Any:
    return dataclasses.field(default_factory=lambda: float(tolerances_config[key]))

@dataclasses.dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by every projector.

    Defaults come from the [tolerances] section of the configuration.
    """

    # Orthonormality drift allowed in a stored basis.
    tol_orth: float = _configured_tolerance("tol_orth")
    # Relative threshold deciding that a projected vector is zero.
    tol_rank: float = _configured_tolerance("tol_rank")
    # Relative residual deciding that a system of equations is consistent.
    tol_feas: float = _configured_tolerance("tol_feas")

    def __post_init__(self) -> None:
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if not (0.0 < value < 1e-4):
                raise InvalidToleranceError(f"{field.name} must lie in (0, 1e-4), got {value!r}")

def as_vector(values: typing.Any, name: str = "vector") -> Vector:
    """Copy values into a read-only float64 vector.

    Rejects empty input, input that is not one-dimensional, and NaN or
    infinite entries.
    """
    try:
        vector = np.array(values, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise InvalidVectorError(f"{name}: {e}") from e
    if vector.ndim != 1 or vector.size == 0:
        raise InvalidVectorError(f"{name} must be a non-empty 1-D array, got shape {vector.shape}")
    if not np.all(np.isfinite(vector)):
        raise InvalidVectorError(f"{name} has non-finite entries")
    vector.flags.writeable = False
    return vector

def as_matrix(values: typing.Any, name: str = "matrix") -> Matrix:
    try:
        matrix = np.array(values, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise InvalidVectorError(f"{name}: {e}") from e
    if matrix.ndim != 2 or matrix.shape[0] == 0 or matrix.shape[1] == 0:
        raise InvalidVectorError(f"{name} must be a non-empty 2-D array, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise InvalidVectorError(f"{name} has non-finite entries")
    matrix.flags.writeable = False
    return matrix

def check_dimension(expected: int, vector: Vector) -> None:
    if vector.shape[-1] != expected:
        raise DimensionMismatchError(expected, vector.shape[-1])

def _stack_rows(rows: typing.Sequence[Vector], ambient_dim: int) -> Matrix:
    matrix = np.array(rows, dtype=np.float64).reshape(len(rows), ambient_dim)
    matrix.flags.writeable = False
    return matrix

def _orthogonal_residual(basis: Matrix, vector: Vector) -> Vector:
    """vector minus its projection onto the row span of basis.

    Classical Gram-Schmidt applied twice.
    """
    residual = vector - basis.T @ (basis @ vector)
    return residual - basis.T @ (basis @ residual)

def orthonormalize(vectors: typing.Iterable[typing.Any], ambient_dim: int, tol: typing.Optional[Tolerances] = None) -> Matrix:
    """Orthonormal basis (as rows) of the span of vectors, in input order.

    A vector is dropped when what remains of it after orthogonalization
    against the vectors kept so far has norm <= tol_rank times its original
    norm.
    """
    if tol is None:
        tol = Tolerances()
    rows: typing.List[Vector] = []
    for index, values in enumerate(vectors):
        vector = as_vector(values, name=f"vector {index}")
        check_dimension(ambient_dim, vector)
        norm = np.linalg.norm(vector)
        residual = _orthogonal_residual(_stack_rows(rows, ambient_dim), vector)
        residual_norm = np.linalg.norm(residual)
        if norm == 0.0 or residual_norm <= tol.tol_rank * norm:
            logger.debug("dropping dependent vector %d", index)
            continue
        rows.append(residual / residual_norm)
    return _stack_rows(rows, ambient_dim)

def complete_basis(basis: Matrix, ambient_dim: int, tol: typing.Optional[Tolerances] = None) -> Matrix:
    """Orthonormal basis (as rows) of the orthogonal complement of the rows
    of basis.

    basis must already be orthonormal. Each step adds the standard basis
    vector with the largest residual against everything chosen so far.
    """
    if tol is None:
        tol = Tolerances()
    rows = list(basis)
    complement: typing.List[Vector] = []
    candidates = np.eye(ambient_dim)
    while len(rows) < ambient_dim:
        current = _stack_rows(rows, ambient_dim)
        residuals = candidates - (candidates @ current.T) @ current
        pick = int(np.argmax(np.linalg.norm(residuals, axis=1)))
        residual = _orthogonal_residual(current, candidates[pick])
        residual_norm = np.linalg.norm(residual)
        if residual_norm <= tol.tol_rank:
            # Only reachable when basis was not orthonormal to begin with.
            raise BasisNotOrthonormalError("cannot complete a basis that is not orthonormal")
        unit = residual / residual_norm
        rows.append(unit)
        complement.append(unit)
    return _stack_rows(complement, ambient_dim)

@dataclasses.dataclass(frozen=True, eq=False)
class Hyperplane:
    """The hyperplane {x : <x, normal> = offset}.

    The normal is kept exactly as given. Formulas divide by ||normal||^2
    instead of normalizing it.
    """

    normal: Vector
    offset: float

    def __post_init__(self) -> None:
        normal = as_vector(self.normal, name="normal")
        offset = float(self.offset)
        if not math.isfinite(offset):
            raise InvalidVectorError("offset must be finite")
        if float(np.dot(normal, normal)) == 0.0:
            raise ZeroNormalError("hyperplane normal must be nonzero")
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", offset)

    @property
    def dim(self) -> int:
        return self.normal.size

    @property
    def normal_norm_squared(self) -> float:
        return float(np.dot(self.normal, self.normal))

    def contains(self, x: typing.Any, tol: typing.Optional[Tolerances] = None) -> bool:
        if tol is None:
            tol = Tolerances()
        x = as_vector(x, name="x")
        check_dimension(self.dim, x)
        residual = abs(float(np.dot(x, self.normal)) - self.offset)
        return residual <= tol.tol_feas * (1.0 + abs(self.offset) + np.linalg.norm(x) * np.linalg.norm(self.normal))

    def as_affine(self, tol: typing.Optional[Tolerances] = None) -> "AffineSubspace":
        """The same set as an AffineSubspace: anchor (offset/||c||^2) c and a
        basis of the orthogonal complement of c.
        """
        unit_normal = _stack_rows([self.normal / np.linalg.norm(self.normal)], self.dim)
        return AffineSubspace(
            anchor=(self.offset / self.normal_norm_squared) * self.normal,
            basis=complete_basis(unit_normal, self.dim, tol),
            tol=tol,
        )

class Infeasible(typing.NamedTuple):
    residual: float

@dataclasses.dataclass(frozen=True, eq=False)
class AffineSubspace:
    """The closed affine subspace anchor + span(basis rows).

    Invariants (checked on construction with tol.tol_orth, by default the
    configured one):
    * the basis rows are orthonormal,
    * the anchor is orthogonal to every basis row, i.e. anchor = P_A(0).

    An empty basis is the singleton {anchor}; a full basis is the whole space.
    """

    anchor: Vector
    basis: Matrix
    # Only tol_orth is used, to check the invariants.
    tol: dataclasses.InitVar[typing.Optional[Tolerances]] = None

    def __post_init__(self, tol: typing.Optional[Tolerances]) -> None:
        anchor = as_vector(self.anchor, name="anchor")
        ambient_dim = anchor.size
        basis = np.array(self.basis, dtype=np.float64)
        if basis.size == 0:
            basis = basis.reshape(0, ambient_dim)
        if basis.ndim != 2:
            raise InvalidVectorError(f"basis must be 2-D, got shape {basis.shape}")
        check_dimension(ambient_dim, basis)
        if not np.all(np.isfinite(basis)):
            raise InvalidVectorError("basis has non-finite entries")
        if basis.shape[0] > ambient_dim:
            raise BasisNotOrthonormalError(f"{basis.shape[0]} basis vectors in dimension {ambient_dim}")
        basis.flags.writeable = False
        object.__setattr__(self, "anchor", anchor)
        object.__setattr__(self, "basis", basis)
        self._check_invariants((tol or Tolerances()).tol_orth)

    def _check_invariants(self, tol_orth: float) -> None:
        gram_error = np.abs(self.basis @ self.basis.T - np.eye(self.dim))
        if gram_error.size and gram_error.max() > tol_orth:
            raise BasisNotOrthonormalError(f"basis drifts from orthonormal by {gram_error.max():.3g}")
        anchor_error = np.abs(self.basis @ self.anchor)
        if anchor_error.size and anchor_error.max() > tol_orth * (1.0 + np.linalg.norm(self.anchor)):
            raise BasisNotOrthonormalError(f"anchor is not orthogonal to the basis (error {anchor_error.max():.3g})")

    @property
    def ambient_dim(self) -> int:
        return self.anchor.size

    @property
    def dim(self) -> int:
        """Dimension of the parallel space U."""
        return self.basis.shape[0]

    def contains(self, x: typing.Any, tol: typing.Optional[Tolerances] = None) -> bool:
        if tol is None:
            tol = Tolerances()
        x = as_vector(x, name="x")
        return np.linalg.norm(x - affine_project(self, x)) <= tol.tol_feas * (1.0 + np.linalg.norm(x))

def hyperplane_project(hyperplane: Hyperplane, x: typing.Any) -> Vector:
    """P_H(x) = x - ((<x,c> - gamma) / ||c||^2) c."""
    x = as_vector(x, name="x")
    check_dimension(hyperplane.dim, x)
    step = (float(np.dot(x, hyperplane.normal)) - hyperplane.offset) / hyperplane.normal_norm_squared
    return x - step * hyperplane.normal

def parallel_project(subspace: AffineSubspace, x: typing.Any) -> Vector:
    x = as_vector(x, name="x")
    check_dimension(subspace.ambient_dim, x)
    return subspace.basis.T @ (subspace.basis @ x)

def affine_project(subspace: AffineSubspace, x: typing.Any) -> Vector:
    return subspace.anchor + parallel_project(subspace, x)

def affine_from_point_basis(point: typing.Any, spanning: typing.Iterable[typing.Any], tol: typing.Optional[Tolerances] = None) -> AffineSubspace:
    point = as_vector(point, name="point")
    basis = orthonormalize(spanning, point.size, tol)
    return AffineSubspace(anchor=_orthogonal_residual(basis, point), basis=basis, tol=tol)

def affine_from_linear_system(matrix: typing.Any, rhs: typing.Any, tol: typing.Optional[Tolerances] = None) -> typing.Union[AffineSubspace, Infeasible]:
    """The solution set of matrix @ x = rhs, or Infeasible.

    The anchor is the minimum-norm solution (it lies in the row space, which
    is the orthogonal complement of the null space). The basis is the
    orthogonal complement of the orthonormalized rows.
    """
    if tol is None:
        tol = Tolerances()
    matrix = as_matrix(matrix, name="M")
    rhs = as_vector(rhs, name="b")
    check_dimension(matrix.shape[0], rhs)
    ambient_dim = matrix.shape[1]

    solution, *_ = np.linalg.lstsq(matrix, rhs, rcond=None)
    residual = float(np.linalg.norm(matrix @ solution - rhs))
    if residual > tol.tol_feas * (1.0 + np.linalg.norm(rhs)):
        logger.debug("linear system is infeasible (residual %.3g)", residual)
        return Infeasible(residual=residual)

    row_basis = orthonormalize(matrix, ambient_dim, tol)
    return AffineSubspace(
        anchor=row_basis.T @ (row_basis @ solution),
        basis=complete_basis(row_basis, ambient_dim, tol),
        tol=tol,
    )
