"""
Lifting the process to a stochastic map on vectorised preparations.

A preparation ``xi`` with system marginal ``p`` is flattened row by row into
``xi_up[(j, k)] = xi_jk * p_k``, a distribution on ``d**2`` pairs. The lifted
map sends pair ``(j, k)`` to ``nu_jk (x) uniform``, where ``nu_jk`` is the
normalised output of the basis operation ``E_jk``; it therefore reproduces
``theta_apply`` on every valid preparation. For a uniform marginal the
flattening is exactly ``vec(xi) / d``.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from probability.distributions import ProbVec, StochMatrix
from probability.exceptions import DimensionMismatchError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class VectorizedPrep:
    entries: ProbVec
    xi: StochMatrix
    marginal: ProbVec

    @property
    def dim(self):
        return self.marginal.dim

    def entry(self, j, k):
        return self.entries[j * self.dim + k]


@dataclass(frozen=True, eq=False)
class LiftedMap:
    matrix: StochMatrix
    dim: int
    # (j, k) columns whose basis output had no mass, completed with the uniform distribution
    flags: list = field(default_factory=list)


def _is_uniform(p):
    return bool(np.all(p.entries == p.entries[0]))


def vectorize_prep(xi, p):
    dim = p.dim
    if xi.shape != (dim, dim):
        raise DimensionMismatchError(f"preparation of shape {xi.shape} with a marginal of dimension {dim}")
    if _is_uniform(p):
        flat = xi.entries.reshape(-1) / dim
    else:
        flat = (xi.entries * p.entries[None, :]).reshape(-1)
    return VectorizedPrep(ProbVec(flat), xi, p)


def lift_output(q):
    """``q (x) uniform``, system factor first."""
    return ProbVec(np.kron(q.entries, np.full(q.dim, 1.0 / q.dim)))


def lift_theta(process):
    dim = process.dim
    size = dim * dim
    nu, empty = process.normalised_outputs()
    columns = np.kron(nu.reshape(size, dim), np.full((1, dim), 1.0 / dim))
    flags = [divmod(int(c), dim) for c in np.flatnonzero(empty.reshape(-1))]
    if flags:
        logger.info(f"[LIFT] completed {len(flags)} zero-mass column(s) uniformly: {flags}")
    return LiftedMap(StochMatrix(columns.T), dim, flags)
