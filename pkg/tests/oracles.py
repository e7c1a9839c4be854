"""Independent reference computations for the tests.

The reference projections here solve the optimization problem directly
and never call hyperproj's projectors.
"""
import typing

import numpy as np
import pytest

from hyperproj.geometry import AffineSubspace, Hyperplane, affine_from_linear_system
from hyperproj.intersection import TrichotomyCase

@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20220622)

def kkt_project(x: np.ndarray, constraints: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """argmin ||z - x|| subject to constraints @ z = rhs.

    Solves the augmented system [[I, C^T], [C, 0]] [z; lambda] = [x; rhs] in
    the least-squares sense, so redundant constraints are fine.
    """
    constraints = np.atleast_2d(np.asarray(constraints, dtype=float))
    rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
    m, n = constraints.shape
    kkt = np.block([[np.eye(n), constraints.T], [constraints, np.zeros((m, m))]])
    solution, *_ = np.linalg.lstsq(kkt, np.concatenate([x, rhs]), rcond=1e-10)
    return solution[:n]

def null_space(matrix: np.ndarray) -> np.ndarray:
    """Orthonormal basis (as rows) of {z : matrix @ z = 0}, from the SVD."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    _, singular_values, vt = np.linalg.svd(matrix)
    rank = int(np.sum(singular_values > 1e-10 * max(1.0, singular_values.max(initial=0.0))))
    return vt[rank:]

class Instance(typing.NamedTuple):
    # A = {z : equations @ z = rhs}.
    equations: np.ndarray
    rhs: np.ndarray
    planted: np.ndarray
    subspace: AffineSubspace
    hyperplane: Hyperplane
    x: np.ndarray

def random_instance(rng: np.random.Generator, case: TrichotomyCase, ambient_dim: int) -> Instance:
    """A random (A, H, x) for which case holds by construction."""
    while True:
        if case is TrichotomyCase.TRANSVERSAL:
            rank = int(rng.integers(1, ambient_dim))
        else:
            rank = int(rng.integers(1, ambient_dim + 1))
        equations = rng.standard_normal((rank, ambient_dim))
        planted = rng.standard_normal(ambient_dim)
        rhs = equations @ planted
        if case is TrichotomyCase.TRANSVERSAL:
            normal = rng.standard_normal(ambient_dim)
            offset = float(3.0 * rng.standard_normal())
            parallel_part = null_space(equations)
            # Keep the oracle well conditioned.
            if np.linalg.norm(parallel_part @ normal) < 1e-2 * np.linalg.norm(normal):
                continue
        else:
            normal = equations.T @ rng.standard_normal(rank)
            offset = float(normal @ planted)
            if case is TrichotomyCase.DEGENERATE_INCONSISTENT:
                offset += float(rng.choice([-1.0, 1.0]) * rng.uniform(1.0, 3.0))
        if np.linalg.cond(equations) > 1e3:
            continue
        subspace = affine_from_linear_system(equations, rhs)
        return Instance(
            equations=equations,
            rhs=rhs,
            planted=planted,
            subspace=subspace,
            hyperplane=Hyperplane(normal=normal, offset=offset),
            x=3.0 * rng.standard_normal(ambient_dim),
        )

def random_subspace_members(rng: np.random.Generator, subspace: AffineSubspace, count: int) -> typing.List[np.ndarray]:
    return [subspace.anchor + rng.standard_normal(subspace.dim) @ subspace.basis for _ in range(count)]
