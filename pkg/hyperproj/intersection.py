"""Projection onto the intersection of an affine subspace and a hyperplane.

Given A = a0 + U and H = {x : <x,c> = gamma}, exactly one case holds:

* DegenerateConsistent: P_U(c) = 0 and A lies inside H. P_{A∩H} = P_A.
* DegenerateInconsistent: P_U(c) = 0 and A misses H. A ∩ H is empty; the
  generalized intersection E = A ∩ (H - g) = Fix(P_A P_H) equals A, so
  P_E = P_A, and g is the gap vector from A to H.
* Transversal: P_U(c) != 0, A ∩ H is nonempty and
  P_{A∩H}(x) = P_A(x) + ((gamma - <P_A(x),c>) / ||P_U(c)||^2) P_U(c).

Two hyperplanes are the special case A = H1.
"""
import enum
import logging
import math
import typing

import numpy as np

from hyperproj.errors import DegenerateDirectionError
from hyperproj.geometry import (
    AffineSubspace,
    Hyperplane,
    Tolerances,
    Vector,
    affine_project,
    as_vector,
    check_dimension,
    hyperplane_project,
    parallel_project,
)

logger = logging.getLogger(__name__)

class TrichotomyCase(enum.Enum):
    DEGENERATE_CONSISTENT = "DegenerateConsistent"
    DEGENERATE_INCONSISTENT = "DegenerateInconsistent"
    TRANSVERSAL = "Transversal"

class TrichotomyResult(typing.NamedTuple):
    case: TrichotomyCase
    # The projection onto A ∩ H, or onto the generalized intersection when
    # case is DEGENERATE_INCONSISTENT. Always a member of A.
    point: Vector
    # Zero unless case is DEGENERATE_INCONSISTENT.
    gap: Vector
    # ||P_U(c)||.
    parallel_norm: float
    # ||c1||^2 ||c2||^2 - <c1,c2>^2, for two-hyperplane problems only.
    determinant: typing.Optional[float] = None

class PairKind(enum.Enum):
    IDENTICAL = "Identical"
    PARALLEL_DISTINCT = "ParallelDistinct"
    TRANSVERSAL = "Transversal"

class PairClassification(typing.NamedTuple):
    kind: PairKind
    determinant: float

def _check_same_dimension(subspace: AffineSubspace, hyperplane: Hyperplane) -> None:
    check_dimension(subspace.ambient_dim, hyperplane.normal)

def _is_degenerate(direction: Vector, hyperplane: Hyperplane, tol: Tolerances) -> bool:
    return np.linalg.norm(direction) <= tol.tol_rank * np.linalg.norm(hyperplane.normal)

def _gap_for_degenerate(subspace: AffineSubspace, hyperplane: Hyperplane, tol: Tolerances) -> Vector:
    """Gap vector when P_U(c) = 0, where <a,c> is the same for every a in A.

    Consistency is decided at the anchor P_A(0), so it depends on (A, H) only.
    """
    anchor = subspace.anchor
    residual = hyperplane.offset - float(np.dot(anchor, hyperplane.normal))
    threshold = tol.tol_feas * (1.0 + abs(hyperplane.offset) + np.linalg.norm(anchor) * np.linalg.norm(hyperplane.normal))
    if abs(residual) <= threshold:
        return np.zeros(subspace.ambient_dim)
    return (residual / hyperplane.normal_norm_squared) * hyperplane.normal

def gap_vector(subspace: AffineSubspace, hyperplane: Hyperplane, tol: typing.Optional[Tolerances] = None) -> Vector:
    """The shortest vector g from A to H (g = P_{cl(H - A)}(0)).

    ||g|| is the distance between A and H, and g = 0 exactly when they
    intersect. g is nonzero only when c is orthogonal to U.
    """
    if tol is None:
        tol = Tolerances()
    _check_same_dimension(subspace, hyperplane)
    direction = parallel_project(subspace, hyperplane.normal)
    if not _is_degenerate(direction, hyperplane, tol):
        return np.zeros(subspace.ambient_dim)
    return _gap_for_degenerate(subspace, hyperplane, tol)

def project_affine_hyperplane(subspace: AffineSubspace, hyperplane: Hyperplane, x: typing.Any, tol: typing.Optional[Tolerances] = None) -> TrichotomyResult:
    if tol is None:
        tol = Tolerances()
    _check_same_dimension(subspace, hyperplane)
    x = as_vector(x, name="x")
    check_dimension(subspace.ambient_dim, x)

    projected = affine_project(subspace, x)
    direction = parallel_project(subspace, hyperplane.normal)
    direction_norm = float(np.linalg.norm(direction))

    if _is_degenerate(direction, hyperplane, tol):
        gap = _gap_for_degenerate(subspace, hyperplane, tol)
        if np.any(gap):
            case = TrichotomyCase.DEGENERATE_INCONSISTENT
        else:
            case = TrichotomyCase.DEGENERATE_CONSISTENT
        logger.debug("%s (||P_U(c)|| = %.3g)", case.value, direction_norm)
        return TrichotomyResult(case=case, point=projected, gap=gap, parallel_norm=direction_norm)

    step = (hyperplane.offset - float(np.dot(projected, hyperplane.normal))) / float(np.dot(direction, direction))
    logger.debug("%s (||P_U(c)|| = %.3g)", TrichotomyCase.TRANSVERSAL.value, direction_norm)
    return TrichotomyResult(
        case=TrichotomyCase.TRANSVERSAL,
        point=projected + step * direction,
        gap=np.zeros(subspace.ambient_dim),
        parallel_norm=direction_norm,
    )

def generalized_project(subspace: AffineSubspace, hyperplane: Hyperplane, x: typing.Any, tol: typing.Optional[Tolerances] = None) -> Vector:
    """Projection onto E = A ∩ (H - g) = Fix(P_A P_H).

    E is A ∩ H when the two intersect.
    """
    return project_affine_hyperplane(subspace, hyperplane, x, tol).point

def generalized_residual(subspace: AffineSubspace, hyperplane: Hyperplane, point: typing.Any) -> float:
    """||p - P_A(P_H(p))||, which vanishes exactly on Fix(P_A P_H)."""
    point = as_vector(point, name="point")
    return float(np.linalg.norm(point - affine_project(subspace, hyperplane_project(hyperplane, point))))

def classify_hyperplane_pair(first: Hyperplane, second: Hyperplane, tol: typing.Optional[Tolerances] = None) -> PairClassification:
    """Classify H1, H2 as identical, parallel but distinct, or transversal.

    The normals count as parallel when sin(angle) <= tol_rank, the same test
    project_affine_hyperplane(H1.as_affine(), H2, x) applies to ||P_U(c2)||.
    D = ||c1||^2 ||c2||^2 - <c1,c2>^2 is evaluated as ||c1||^2 ||r||^2 with
    r = c2 - (<c1,c2> / ||c1||^2) c1, which has no cancellation.
    """
    if tol is None:
        tol = Tolerances()
    check_dimension(first.dim, second.normal)
    first_norm_squared = first.normal_norm_squared
    second_norm_squared = second.normal_norm_squared
    cross = float(np.dot(first.normal, second.normal))
    rejection = second.normal - (cross / first_norm_squared) * first.normal
    rejection_norm = float(np.linalg.norm(rejection))
    determinant = first_norm_squared * rejection_norm * rejection_norm

    if rejection_norm > tol.tol_rank * math.sqrt(second_norm_squared):
        return PairClassification(kind=PairKind.TRANSVERSAL, determinant=determinant)
    # Normals are parallel: c2 = (cross / ||c1||^2) c1.
    mismatch = abs(second.offset * first_norm_squared - cross * first.offset)
    threshold = tol.tol_feas * first_norm_squared * (1.0 + abs(first.offset) + abs(second.offset))
    if mismatch <= threshold:
        return PairClassification(kind=PairKind.IDENTICAL, determinant=determinant)
    return PairClassification(kind=PairKind.PARALLEL_DISTINCT, determinant=determinant)

def project_two_hyperplanes(first: Hyperplane, second: Hyperplane, x: typing.Any, tol: typing.Optional[Tolerances] = None) -> TrichotomyResult:
    """Closed-form projection onto H1 ∩ H2 (or onto Fix(P_H1 P_H2) when the
    hyperplanes are parallel and distinct).
    """
    classification = classify_hyperplane_pair(first, second, tol)
    x = as_vector(x, name="x")
    check_dimension(first.dim, x)
    first_norm_squared = first.normal_norm_squared
    determinant = classification.determinant
    parallel_norm = math.sqrt(max(determinant, 0.0) / first_norm_squared)
    zero = np.zeros(first.dim)

    if classification.kind is PairKind.IDENTICAL:
        return TrichotomyResult(
            case=TrichotomyCase.DEGENERATE_CONSISTENT,
            point=hyperplane_project(first, x),
            gap=zero,
            parallel_norm=parallel_norm,
            determinant=determinant,
        )
    cross = float(np.dot(first.normal, second.normal))
    if classification.kind is PairKind.PARALLEL_DISTINCT:
        # The anchor of H1 is (gamma1 / ||c1||^2) c1.
        gap_step = (second.offset - cross * first.offset / first_norm_squared) / second.normal_norm_squared
        return TrichotomyResult(
            case=TrichotomyCase.DEGENERATE_INCONSISTENT,
            point=hyperplane_project(first, x),
            gap=gap_step * second.normal,
            parallel_norm=parallel_norm,
            determinant=determinant,
        )

    first_residual = float(np.dot(x, first.normal)) - first.offset
    second_residual = float(np.dot(x, second.normal)) - second.offset
    first_step = (cross * second_residual - second.normal_norm_squared * first_residual) / determinant
    second_step = (cross * first_residual - first_norm_squared * second_residual) / determinant
    return TrichotomyResult(
        case=TrichotomyCase.TRANSVERSAL,
        point=x + first_step * first.normal + second_step * second.normal,
        gap=zero,
        parallel_norm=parallel_norm,
        determinant=determinant,
    )

def orthant_project(x: typing.Any) -> Vector:
    """Projection onto the nonnegative orthant."""
    return np.maximum(as_vector(x, name="x"), 0.0)

def segment_project(x: typing.Any, start: typing.Any, end: typing.Any) -> Vector:
    """Projection onto the segment conv{start, end}."""
    x = as_vector(x, name="x")
    start = as_vector(start, name="start")
    end = as_vector(end, name="end")
    check_dimension(x.size, start)
    check_dimension(x.size, end)
    direction = end - start
    length_squared = float(np.dot(direction, direction))
    if length_squared == 0.0:
        return start
    t = min(1.0, max(0.0, float(np.dot(x - start, direction)) / length_squared))
    return start + t * direction

def naive_cone_formula(project_cone: typing.Callable[[Vector], typing.Any], direction: typing.Any, offset: float, x: typing.Any, tol: typing.Optional[Tolerances] = None) -> Vector:
    """The affine-subspace formula with P_A replaced by a cone projector P_K:

        P_K(x) + ((offset - <P_K(x), v>) / ||P_K(v)||^2) P_K(v)

    This is NOT the projection onto K ∩ H. For K = R^2_+ and
    H = {x : x1 + x2 = 1} it leaves K. Kept as a counterexample.

    Raises DegenerateDirectionError when P_K(v) = 0.
    """
    if tol is None:
        tol = Tolerances()
    direction = as_vector(direction, name="direction")
    x = as_vector(x, name="x")
    check_dimension(direction.size, x)
    projected_direction = as_vector(project_cone(direction), name="P_K(direction)")
    if np.linalg.norm(projected_direction) <= tol.tol_rank * np.linalg.norm(direction):
        raise DegenerateDirectionError("P_K(direction) is zero")
    projected = as_vector(project_cone(x), name="P_K(x)")
    step = (offset - float(np.dot(projected, direction))) / float(np.dot(projected_direction, projected_direction))
    return projected + step * projected_direction
