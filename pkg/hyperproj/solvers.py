"""Cyclic projections over the hyperplanes of a linear system Mx = b.

Two sweep operators are compared:

    P = P_{H_m} ... P_{H_2} P_{H_1}              (one hyperplane at a time)
    Q = ... P_{H_4 ∩ H_3} P_{H_2 ∩ H_1}          (consecutive pairs, closed form)

Both are cyclic projection methods for a consistent system, so their
iterates converge to x* = P_C(x0) with C = {x : Mx = b}.
"""
import csv
import dataclasses
import enum
import io
import logging
import math
import multiprocessing.dummy
import pathlib
import typing

import numpy as np

from hyperproj.config import cfg
from hyperproj.errors import (
    ConvergedAtStartError,
    InfeasibleSystemError,
    InvalidExperimentConfigError,
    InvalidPairingError,
)
from hyperproj.geometry import (
    AffineSubspace,
    Hyperplane,
    Infeasible,
    Matrix,
    Tolerances,
    Vector,
    affine_from_linear_system,
    affine_project,
    as_matrix,
    as_vector,
    check_dimension,
    hyperplane_project,
    orthonormalize,
)
from hyperproj.intersection import TrichotomyCase, project_two_hyperplanes

experiment_config = cfg["experiment"]

logger = logging.getLogger(__name__)

PROXIMITY_FLOOR_DB = -320.0
CONVERGED_AT_START_DISTANCE = 1e-300

CSV_HEADER = ("iteration", "median_db_single", "median_db_paired")

@dataclasses.dataclass(frozen=True, eq=False)
class HyperplaneFamily:
    planes: typing.Tuple[Hyperplane, ...]
    source: typing.Optional[typing.Tuple[Matrix, Vector]] = None

    def __post_init__(self) -> None:
        planes = tuple(self.planes)
        if not planes:
            raise InvalidPairingError("a hyperplane family needs at least one hyperplane")
        for plane in planes[1:]:
            check_dimension(planes[0].dim, plane.normal)
        object.__setattr__(self, "planes", planes)

    @classmethod
    def from_linear_system(cls, matrix: typing.Any, rhs: typing.Any) -> "HyperplaneFamily":
        matrix = as_matrix(matrix, name="M")
        rhs = as_vector(rhs, name="b")
        check_dimension(matrix.shape[0], rhs)
        planes = tuple(Hyperplane(normal=row, offset=value) for row, value in zip(matrix, rhs))
        return cls(planes=planes, source=(matrix, rhs))

    @property
    def dim(self) -> int:
        return self.planes[0].dim

    def __len__(self) -> int:
        return len(self.planes)

class SweepKind(enum.Enum):
    SINGLE_PASS = "SinglePass"
    PAIRED_PASS = "PairedPass"

@dataclasses.dataclass(frozen=True, eq=False)
class SweepOperator:
    """One full cyclic pass over a HyperplaneFamily.

    A PairedPass projects onto pairing[0], then pairing[1], ... using the
    two-hyperplane closed form, and finally onto the leftover hyperplane (if
    any). The pairing and leftover must cover every plane exactly once.
    """

    kind: SweepKind
    family: HyperplaneFamily
    pairing: typing.Tuple[typing.Tuple[int, int], ...] = ()
    leftover: typing.Optional[int] = None
    tol: Tolerances = dataclasses.field(default_factory=Tolerances)

    def __post_init__(self) -> None:
        pairing = tuple((int(i), int(j)) for i, j in self.pairing)
        object.__setattr__(self, "pairing", pairing)
        if self.kind is SweepKind.SINGLE_PASS:
            if pairing or self.leftover is not None:
                raise InvalidPairingError("a SinglePass sweep takes no pairing")
            return
        covered = [index for pair in pairing for index in pair]
        if self.leftover is not None:
            covered.append(self.leftover)
        if sorted(covered) != list(range(len(self.family))):
            raise InvalidPairingError(f"pairing {pairing} with leftover {self.leftover} does not cover each of {len(self.family)} planes once")

    @classmethod
    def single(cls, family: HyperplaneFamily, tol: typing.Optional[Tolerances] = None) -> "SweepOperator":
        return cls(kind=SweepKind.SINGLE_PASS, family=family, tol=tol or Tolerances())

    @classmethod
    def paired(cls, family: HyperplaneFamily, tol: typing.Optional[Tolerances] = None) -> "SweepOperator":
        """Pairs consecutive rows (1,2), (3,4), ...; an odd last row is
        projected onto alone at the end of the sweep.
        """
        count = len(family)
        pairing = tuple((i, i + 1) for i in range(0, count - 1, 2))
        leftover = count - 1 if count % 2 else None
        return cls(kind=SweepKind.PAIRED_PASS, family=family, pairing=pairing, leftover=leftover, tol=tol or Tolerances())

def sweep(operator: SweepOperator, x: typing.Any) -> Vector:
    x = as_vector(x, name="x")
    check_dimension(operator.family.dim, x)
    planes = operator.family.planes
    if operator.kind is SweepKind.SINGLE_PASS:
        for plane in planes:
            x = hyperplane_project(plane, x)
        return x
    for i, j in operator.pairing:
        result = project_two_hyperplanes(planes[i], planes[j], x, operator.tol)
        if result.case is not TrichotomyCase.TRANSVERSAL:
            logger.warning("rows %d and %d are parallel (%s); projecting onto row %d", i, j, result.case.value, i)
        x = result.point
    if operator.leftover is not None:
        x = hyperplane_project(planes[operator.leftover], x)
    return x

def exact_projection(matrix: typing.Any, rhs: typing.Any, x0: typing.Any, tol: typing.Optional[Tolerances] = None) -> Vector:
    """x* = P_C(x0) for C = {x : Mx = b}, the limit of both cyclic sequences.

    Raises InfeasibleSystemError when C is empty.
    """
    solution_set = affine_from_linear_system(matrix, rhs, tol)
    if isinstance(solution_set, Infeasible):
        raise InfeasibleSystemError(solution_set.residual)
    return affine_project(solution_set, x0)

def proximity_db(x_n: typing.Any, x0: typing.Any, x_star: typing.Any) -> float:
    """20 log10(||x_n - x*|| / ||x0 - x*||), clamped below at -320 dB.

    Raises ConvergedAtStartError when x0 is (numerically) x* already.
    """
    x_n = as_vector(x_n, name="x_n")
    x0 = as_vector(x0, name="x0")
    x_star = as_vector(x_star, name="x_star")
    initial = float(np.linalg.norm(x0 - x_star))
    if initial <= CONVERGED_AT_START_DISTANCE:
        raise ConvergedAtStartError(f"start point is within {initial:.3g} of the solution")
    ratio = float(np.linalg.norm(x_n - x_star)) / initial
    if ratio == 0.0:
        return PROXIMITY_FLOOR_DB
    return max(PROXIMITY_FLOOR_DB, 20.0 * math.log10(ratio))

def _configured(key: str) -> typing.Any:
    return dataclasses.field(default_factory=lambda: experiment_config[key])

@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of the cyclic projection experiment.

    Defaults come from the [experiment] section of the configuration.
    """

    rows: int = _configured("rows")
    cols: int = _configured("cols")
    instances: int = _configured("instances")
    starts_per_instance: int = _configured("starts_per_instance")
    iterations: int = _configured("iterations")
    seed: int = _configured("seed")
    # Threads evaluating instances. The result does not depend on it.
    processes: int = _configured("processes")
    # Orthonormalize the rows of each drawn M before setting b = M x̄.
    orthonormal_rows: bool = False

    def __post_init__(self) -> None:
        for name in ("rows", "cols", "instances", "starts_per_instance", "processes"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise InvalidExperimentConfigError(f"{name} must be a positive integer, got {value!r}")
        if not isinstance(self.iterations, int) or self.iterations < 0:
            raise InvalidExperimentConfigError(f"iterations must be a nonnegative integer, got {self.iterations!r}")
        if not isinstance(self.seed, int) or not (0 <= self.seed < 2**64):
            raise InvalidExperimentConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.rows > self.cols:
            raise InvalidExperimentConfigError(f"rows ({self.rows}) must not exceed cols ({self.cols})")

@dataclasses.dataclass(frozen=True)
class ConvergenceTable:
    iteration_index: typing.Tuple[int, ...]
    median_db_single: typing.Tuple[float, ...]
    median_db_paired: typing.Tuple[float, ...]

    def __post_init__(self) -> None:
        if not (len(self.iteration_index) == len(self.median_db_single) == len(self.median_db_paired)):
            raise ValueError("convergence table columns differ in length")

    def to_csv_text(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for index, single, paired in zip(self.iteration_index, self.median_db_single, self.median_db_paired):
            writer.writerow((index, f"{single:.16e}", f"{paired:.16e}"))
        return buffer.getvalue()

    def write_csv(self, path: typing.Union[str, pathlib.Path]) -> None:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(self.to_csv_text())

class ExperimentInstance(typing.NamedTuple):
    matrix: Matrix
    rhs: Vector
    family: HyperplaneFamily
    solution_set: AffineSubspace

class CellTrace(typing.NamedTuple):
    """The trajectories of one (instance, start) pair, for n = 0..iterations."""
    instance: int
    start: int
    solution: Vector
    distances_single: np.ndarray
    distances_paired: np.ndarray
    db_single: np.ndarray
    db_paired: np.ndarray

def _generator(seed: int, *spawn_key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=spawn_key)))

def draw_instance(config: ExperimentConfig, instance: int, tol: typing.Optional[Tolerances] = None) -> ExperimentInstance:
    """Draw M with iid standard normal entries, x̄ likewise, and set b = M x̄
    so that Mx = b is consistent.
    """
    rng = _generator(config.seed, instance)
    matrix = rng.standard_normal((config.rows, config.cols))
    if config.orthonormal_rows:
        matrix = orthonormalize(matrix, config.cols, tol)
    planted = rng.standard_normal(config.cols)
    rhs = matrix @ planted
    solution_set = affine_from_linear_system(matrix, rhs, tol)
    if isinstance(solution_set, Infeasible):
        raise InfeasibleSystemError(solution_set.residual)
    return ExperimentInstance(
        matrix=matrix,
        rhs=rhs,
        family=HyperplaneFamily.from_linear_system(matrix, rhs),
        solution_set=solution_set,
    )

def _trace_cell(config: ExperimentConfig, drawn: ExperimentInstance, instance: int, start: int, tol: Tolerances) -> CellTrace:
    x0 = _generator(config.seed, instance, start).standard_normal(config.cols)
    x_star = affine_project(drawn.solution_set, x0)
    single = SweepOperator.single(drawn.family, tol)
    paired = SweepOperator.paired(drawn.family, tol)

    p = q = x0
    distances_single = [float(np.linalg.norm(p - x_star))]
    distances_paired = [float(np.linalg.norm(q - x_star))]
    db_single = [0.0]
    db_paired = [0.0]
    try:
        proximity_db(x0, x0, x_star)
        converged_at_start = False
    except ConvergedAtStartError:
        logger.warning("instance %d start %d is converged at start", instance, start)
        converged_at_start = True
    for _ in range(config.iterations):
        p = sweep(single, p)
        q = sweep(paired, q)
        distances_single.append(float(np.linalg.norm(p - x_star)))
        distances_paired.append(float(np.linalg.norm(q - x_star)))
        if converged_at_start:
            db_single.append(PROXIMITY_FLOOR_DB)
            db_paired.append(PROXIMITY_FLOOR_DB)
        else:
            db_single.append(proximity_db(p, x0, x_star))
            db_paired.append(proximity_db(q, x0, x_star))
    return CellTrace(
        instance=instance,
        start=start,
        solution=x_star,
        distances_single=np.array(distances_single),
        distances_paired=np.array(distances_paired),
        db_single=np.array(db_single),
        db_paired=np.array(db_paired),
    )

def trace_cell(config: ExperimentConfig, instance: int, start: int, tol: typing.Optional[Tolerances] = None) -> CellTrace:
    if tol is None:
        tol = Tolerances()
    return _trace_cell(config, draw_instance(config, instance, tol), instance, start, tol)

def run_experiment(config: ExperimentConfig, tol: typing.Optional[Tolerances] = None) -> ConvergenceTable:
    """Median dB proximity of the P- and Q-sequences per iteration index.

    The median is taken over the starts of each instance, then over the
    instances. Instances run concurrently; results are aggregated in
    instance order, so the table depends on config only.
    """
    if tol is None:
        tol = Tolerances()

    def run_instance(instance: int) -> typing.Tuple[np.ndarray, np.ndarray]:
        drawn = draw_instance(config, instance, tol)
        traces = [_trace_cell(config, drawn, instance, start, tol) for start in range(config.starts_per_instance)]
        single = np.median(np.array([trace.db_single for trace in traces]), axis=0)
        paired = np.median(np.array([trace.db_paired for trace in traces]), axis=0)
        logger.info("instance %d/%d done: %.1f dB single, %.1f dB paired", instance + 1, config.instances, single[-1], paired[-1])
        return single, paired

    with multiprocessing.dummy.Pool(processes=config.processes) as pool:
        per_instance = pool.map(run_instance, range(config.instances))

    single = np.median(np.array([s for s, _ in per_instance]), axis=0)
    paired = np.median(np.array([p for _, p in per_instance]), axis=0)
    return ConvergenceTable(
        iteration_index=tuple(range(config.iterations + 1)),
        median_db_single=tuple(float(value) for value in single),
        median_db_paired=tuple(float(value) for value in paired),
    )
