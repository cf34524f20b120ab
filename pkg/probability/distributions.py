"""
Value types for finite probability theory: distributions, (sub-)stochastic
matrices and joint system-environment distributions.

Conventions used throughout the project:

* matrices are column-stochastic, column ``k`` is the output distribution for
  input basis state ``k`` and maps act on column vectors;
* joint distributions are indexed ``(s, e)`` and flatten system-major, so the
  composite index is ``i = s * d_E + e``.

All values are immutable after construction (their numpy buffers are marked
read-only), so they can be shared freely between worker threads.
"""
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    InvalidDistributionError,
    NotStochasticError,
    RankDeficientError,
    ZeroMarginalError,
)

SUM_TOL = 1e-9
CLAMP_TOL = 1e-12
RANK_TOL = 1e-10

CONVENTION = 'column-stochastic'


def _float_array(values, ndim, label):
    arr = np.array(getattr(values, 'entries', values), dtype=float)
    if arr.ndim != ndim or arr.size == 0:
        raise InvalidDistributionError(
            f"{label} must be a non-empty {ndim}-d array, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise InvalidDistributionError(f"{label} has non-finite entries")
    return arr


def _freeze(arr):
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ProbVec:
    """A probability distribution over ``dim`` outcomes."""

    entries: np.ndarray

    def __post_init__(self):
        arr = _float_array(self.entries, 1, 'ProbVec')
        worst = int(np.argmin(arr))
        if arr[worst] < -CLAMP_TOL:
            raise InvalidDistributionError(
                f"ProbVec entry {worst} is negative ({arr[worst]!r})"
            )
        negative = arr < 0
        arr[negative] = 0.0
        total = arr.sum()
        if not abs(total - 1.0) <= SUM_TOL:
            raise InvalidDistributionError(f"ProbVec entries sum to {total!r}, not 1")
        if negative.any():
            arr = arr / total
        object.__setattr__(self, 'entries', _freeze(arr))

    @classmethod
    def uniform(cls, dim):
        return cls(np.full(dim, 1.0 / dim))

    @classmethod
    def point(cls, dim, index):
        arr = np.zeros(dim)
        arr[index] = 1.0
        return cls(arr)

    @property
    def dim(self):
        return self.entries.shape[0]

    def __len__(self):
        return self.dim

    def __getitem__(self, index):
        return float(self.entries[index])

    def __iter__(self):
        return iter(self.entries.tolist())

    def tolist(self):
        return self.entries.tolist()

    def isclose(self, other, atol=1e-12):
        other = np.asarray(getattr(other, 'entries', other), dtype=float)
        return other.shape == self.entries.shape and bool(
            np.max(np.abs(self.entries - other)) <= atol
        )

    def __repr__(self):
        return f"ProbVec({self.tolist()!r})"


@dataclass(frozen=True, eq=False)
class SubStochMatrix:
    """
    Non-negative matrix whose columns carry at most unit mass.

    Measure-and-prepare operations such as the matrix units ``E_jk`` live here;
    they are not trace preserving on their own.
    """

    entries: np.ndarray

    def __post_init__(self):
        name = type(self).__name__
        arr = _float_array(self.entries, 2, name)
        row, col = np.unravel_index(int(np.argmin(arr)), arr.shape)
        if arr[row, col] < -CLAMP_TOL:
            raise NotStochasticError(
                f"{name} entry ({row}, {col}) is negative ({arr[row, col]!r})",
                worst_entry=float(arr[row, col]),
            )
        arr[arr < 0] = 0.0
        self._check_columns(arr.sum(axis=0))
        object.__setattr__(self, 'entries', _freeze(arr))

    def _check_columns(self, sums):
        worst = int(np.argmax(sums))
        if sums[worst] > 1.0 + SUM_TOL:
            raise NotStochasticError(
                f"{type(self).__name__} column {worst} carries mass {sums[worst]!r} > 1",
                worst_column_sum=float(sums[worst]),
            )

    @classmethod
    def unit(cls, j, k, dim):
        """Matrix unit E_jk: measure basis state k, then prepare basis state j."""
        arr = np.zeros((dim, dim))
        arr[j, k] = 1.0
        return SubStochMatrix(arr)

    @property
    def convention(self):
        return CONVENTION

    @property
    def d_out(self):
        return self.entries.shape[0]

    @property
    def d_in(self):
        return self.entries.shape[1]

    @property
    def shape(self):
        return self.entries.shape

    @property
    def is_square(self):
        return self.d_out == self.d_in

    def column(self, k):
        return self.entries[:, k]

    def tolist(self):
        return self.entries.tolist()

    def isclose(self, other, atol=1e-12):
        other = np.asarray(getattr(other, 'entries', other), dtype=float)
        return other.shape == self.entries.shape and bool(
            np.max(np.abs(self.entries - other)) <= atol
        )

    def __repr__(self):
        return f"{type(self).__name__}({self.tolist()!r})"


class StochMatrix(SubStochMatrix):
    """Column-stochastic matrix: every column is a probability distribution."""

    def _check_columns(self, sums):
        worst = int(np.argmax(np.abs(sums - 1.0)))
        if abs(sums[worst] - 1.0) > SUM_TOL:
            raise NotStochasticError(
                f"StochMatrix column {worst} sums to {sums[worst]!r}, not 1",
                worst_column_sum=float(sums[worst]),
            )

    @classmethod
    def identity(cls, dim):
        return cls(np.eye(dim))

    @classmethod
    def from_permutation(cls, perm):
        """Deterministic map sending basis state ``k`` to ``perm[k]``."""
        dim = len(perm)
        arr = np.zeros((dim, dim))
        arr[list(perm), range(dim)] = 1.0
        return cls(arr)

    @classmethod
    def constant(cls, p, d_in):
        """Map with every column equal to ``p``."""
        p = p if isinstance(p, ProbVec) else ProbVec(p)
        return cls(np.tile(p.entries[:, None], (1, d_in)))


@dataclass(frozen=True, eq=False)
class SubJointDist:
    """Non-negative ``d_S x d_E`` array with total mass at most one."""

    entries: np.ndarray

    def __post_init__(self):
        name = type(self).__name__
        arr = _float_array(self.entries, 2, name)
        if arr.min() < -CLAMP_TOL:
            raise InvalidDistributionError(f"{name} has a negative entry ({arr.min()!r})")
        arr[arr < 0] = 0.0
        self._check_mass(arr.sum())
        object.__setattr__(self, 'entries', _freeze(arr))

    def _check_mass(self, total):
        if total > 1.0 + SUM_TOL:
            raise InvalidDistributionError(f"{type(self).__name__} mass {total!r} exceeds 1")

    @classmethod
    def from_vector(cls, vector, d_s, d_e):
        arr = np.asarray(getattr(vector, 'entries', vector), dtype=float)
        if arr.shape != (d_s * d_e,):
            raise DimensionMismatchError(
                f"composite vector of length {arr.shape} does not match {d_s}x{d_e}"
            )
        return cls(arr.reshape(d_s, d_e))

    @property
    def convention(self):
        return CONVENTION

    @property
    def d_s(self):
        return self.entries.shape[0]

    @property
    def d_e(self):
        return self.entries.shape[1]

    @property
    def mass(self):
        return float(self.entries.sum())

    @property
    def vector(self):
        """System-major flattening, ``i = s * d_E + e``."""
        return self.entries.reshape(-1)

    def tolist(self):
        return self.entries.tolist()

    def isclose(self, other, atol=1e-12):
        other = np.asarray(getattr(other, 'entries', other), dtype=float)
        return other.shape == self.entries.shape and bool(
            np.max(np.abs(self.entries - other)) <= atol
        )

    def __repr__(self):
        return f"{type(self).__name__}({self.tolist()!r})"


class JointDist(SubJointDist):
    """Normalised joint distribution over system x environment."""

    def _check_mass(self, total):
        if abs(total - 1.0) > SUM_TOL:
            raise InvalidDistributionError(f"JointDist entries sum to {total!r}, not 1")

    @classmethod
    def product(cls, p, t):
        return cls(np.outer(p.entries, t.entries))


def apply(matrix, p):
    """Push the distribution ``p`` through ``matrix``."""
    if matrix.d_in != p.dim:
        raise DimensionMismatchError(
            f"map expects inputs of dimension {matrix.d_in}, got {p.dim}"
        )
    return ProbVec(matrix.entries @ p.entries)


def infer_stochastic_map(inputs, outputs):
    """
    Recover the linear map sending each input to its observed output.

    With basis inputs this is the sum of outer products ``q_j u_j^T``. Outputs
    may be raw observed vectors; if the solution leaves the set of stochastic
    matrices the observed dynamics has no stochastic-map description.
    """
    if len(inputs) != len(outputs):
        raise DimensionMismatchError(
            f"got {len(inputs)} inputs but {len(outputs)} outputs"
        )
    x = np.column_stack([_float_array(v, 1, 'input') for v in inputs])
    y = np.column_stack([_float_array(v, 1, 'output') for v in outputs])
    dim = x.shape[0]
    if x.shape[1] < dim:
        raise RankDeficientError(
            f"{x.shape[1]} inputs cannot span dimension {dim}", rank=x.shape[1], required=dim
        )
    if x.shape[1] > dim:
        raise DimensionMismatchError(f"expected {dim} input/output pairs, got {x.shape[1]}")
    rank = int(np.linalg.matrix_rank(x, tol=RANK_TOL))
    if rank < dim:
        raise RankDeficientError(
            f"inputs are linearly dependent (rank {rank} < {dim})", rank=rank, required=dim
        )
    solution = np.linalg.solve(x.T, y.T).T
    try:
        return StochMatrix(solution)
    except NotStochasticError as exc:
        raise NotStochasticError(
            f"dynamics not describable by a stochastic map: {exc}",
            worst_entry=exc.worst_entry,
            worst_column_sum=exc.worst_column_sum,
        ) from exc


def marginal_system(joint):
    return ProbVec(joint.entries.sum(axis=1))


def marginal_env(joint):
    return ProbVec(joint.entries.sum(axis=0))


def conditional_env_given_system(joint, s):
    """Environment distribution conditioned on the system being in state ``s``."""
    if not 0 <= s < joint.d_s:
        raise DimensionMismatchError(f"system index {s} outside 0..{joint.d_s - 1}")
    row = joint.entries[s]
    mass = row.sum()
    if mass <= 0:
        raise ZeroMarginalError(f"cannot condition on system state {s}: zero marginal", index=s)
    return ProbVec(row / mass)


def is_product(joint, tol):
    outer = np.outer(marginal_system(joint).entries, marginal_env(joint).entries)
    return bool(np.max(np.abs(joint.entries - outer)) <= tol)
