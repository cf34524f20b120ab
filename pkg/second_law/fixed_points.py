"""
Fixed points of stochastic maps.

Small maps are solved directly through the null space of ``M - I``. When that
space is more than one dimensional, or the map is large, the canonical fixed
point is the limit of the lazy chain ``(M + I) / 2`` started from the uniform
distribution.
"""
import logging
from dataclasses import dataclass

import numpy as np

from probability.distributions import RANK_TOL, ProbVec

from .exceptions import FixedPointNotConverged

logger = logging.getLogger(__name__)

DIRECT_LIMIT = 64
POWER_TOL = 1e-12
MAX_ITERATIONS = 10 ** 6
RESIDUAL_TOL = 1e-10
# entries below this are rounding noise around an exact zero
ZERO_FLOOR = 1e-14


@dataclass(frozen=True, eq=False)
class FixedPoint:
    epsilon: ProbVec
    residual: float
    unique: bool


def _residual(matrix, v):
    return float(np.abs(matrix @ v - v).sum())


def _clean(v):
    v = np.where(v < ZERO_FLOOR, 0.0, v)
    return v / v.sum()


def _null_dimension(matrix):
    singular = np.linalg.svd(matrix - np.eye(matrix.shape[0]), compute_uv=False)
    return int(np.sum(singular <= RANK_TOL))


def _nullspace_vector(matrix):
    _, _, vh = np.linalg.svd(matrix - np.eye(matrix.shape[0]))
    v = vh[-1]
    # the kernel of a stochastic map is spanned by a non-negative vector up to sign
    v = v if v.sum() >= 0 else -v
    return _clean(v)


def _lazy_power_iteration(matrix):
    n = matrix.shape[0]
    lazy = 0.5 * (matrix + np.eye(n))
    v = np.full(n, 1.0 / n)
    for it in range(1, MAX_ITERATIONS + 1):
        nxt = lazy @ v
        step = float(np.abs(nxt - v).sum())
        v = nxt
        if step <= POWER_TOL:
            logger.debug(f"[FIXED-POINT] power iteration settled after {it} steps")
            return _clean(v)
    residual = _residual(matrix, v)
    raise FixedPointNotConverged(
        f"power iteration did not settle in {MAX_ITERATIONS} steps (residual {residual:.3e})",
        residual=residual,
        iterations=MAX_ITERATIONS,
    )


def stationary_distribution(m):
    """Fixed point of a square stochastic matrix."""
    matrix = m.entries
    n = matrix.shape[0]
    unique = _null_dimension(matrix) <= 1
    if unique and n <= DIRECT_LIMIT:
        v = _nullspace_vector(matrix)
        if _residual(matrix, v) > RESIDUAL_TOL:
            logger.warning('[FIXED-POINT] direct solve left a large residual, falling back to iteration')
            v = _lazy_power_iteration(matrix)
    else:
        if not unique:
            logger.info(f"[FIXED-POINT] eigenvalue 1 is degenerate for a {n}x{n} map, using the uniform-start limit")
        v = _lazy_power_iteration(matrix)
    residual = _residual(matrix, v)
    if residual > RESIDUAL_TOL:
        raise FixedPointNotConverged(f"fixed point residual {residual:.3e}", residual=residual)
    return FixedPoint(ProbVec(v), residual, unique)


def fixed_point(lifted):
    return stationary_distribution(lifted.matrix)
