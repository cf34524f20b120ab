"""
System dynamics under initial system-environment correlations.

The reduced map an oblivious observer writes down (``naive_map``) depends on
the joint state; the object that does not is the supermap from the
experimenter's preparation ``xi`` to the system output. ``ProcessMap`` stores
it by its action on the matrix units ``E_jk`` (measure ``k``, prepare ``j``),
and ``theta_apply`` predicts any other preparation by linearity.
"""
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from probability.distributions import (
    CLAMP_TOL,
    SUM_TOL,
    JointDist,
    ProbVec,
    StochMatrix,
    SubJointDist,
    SubStochMatrix,
    conditional_env_given_system,
    marginal_system,
)
from probability.exceptions import DimensionMismatchError, InvalidDistributionError

# below this mass a basis output is treated as never observed
MASS_FLOOR = 1e-300


@dataclass(frozen=True, eq=False)
class ProcessMap:
    """
    ``basis_outputs[j, k]`` is the sub-normalised system output for the
    preparation ``E_jk``; its mass is the marginal probability ``p_k``.

    Maps reconstructed from finite samples set ``estimated`` and are only
    required to be non-negative with masses of at most one per cell. Their
    cell masses need not agree with ``marginal``, so ``theta_apply`` weights
    the normalised cell outputs by ``marginal`` instead, as the lifted map does.
    """

    basis_outputs: np.ndarray
    marginal: ProbVec
    estimated: bool = False

    def __post_init__(self):
        marginal = self.marginal if isinstance(self.marginal, ProbVec) else ProbVec(self.marginal)
        dim = marginal.dim
        arr = np.array(self.basis_outputs, dtype=float)
        if arr.shape != (dim, dim, dim):
            raise DimensionMismatchError(
                f"basis outputs of shape {arr.shape} do not match system dimension {dim}"
            )
        if arr.min() < -CLAMP_TOL:
            raise InvalidDistributionError(f"negative basis output entry {arr.min()!r}")
        arr[arr < 0] = 0.0
        masses = arr.sum(axis=2)
        if self.estimated:
            if masses.max() > 1.0 + SUM_TOL:
                raise InvalidDistributionError('estimated basis output carries mass above 1')
        else:
            drift = np.abs(masses - marginal.entries[None, :])
            if drift.max() > SUM_TOL:
                j, k = np.unravel_index(int(np.argmax(drift)), drift.shape)
                raise InvalidDistributionError(
                    f"basis output ({j}, {k}) has mass {masses[j, k]!r}, "
                    f"expected p_{k} = {marginal[k]!r}"
                )
        arr.setflags(write=False)
        object.__setattr__(self, 'basis_outputs', arr)
        object.__setattr__(self, 'marginal', marginal)

    @property
    def dim(self):
        return self.marginal.dim

    @property
    def masses(self):
        return self.basis_outputs.sum(axis=2)

    def output(self, j, k):
        return self.basis_outputs[j, k]

    def conditional_output(self, j, k):
        """Normalised output for ``E_jk``, or None when the cell has no mass."""
        out = self.basis_outputs[j, k]
        mass = out.sum()
        if mass <= MASS_FLOOR:
            return None
        return ProbVec(out / mass)

    def normalised_outputs(self):
        """
        Every cell scaled to unit mass, shape ``(d, d, d)``, with the mask of
        cells that had no mass; those are completed with the uniform distribution.
        """
        masses = self.masses
        empty = masses <= MASS_FLOOR
        nu = np.full(self.basis_outputs.shape, 1.0 / self.dim)
        nu[~empty] = self.basis_outputs[~empty] / masses[~empty][:, None]
        return nu, empty


def _require_stochastic_on(xi, dim):
    if xi.shape != (dim, dim):
        raise DimensionMismatchError(f"preparation of shape {xi.shape} does not act on dimension {dim}")


def conditional_maps(channel, joint):
    """One reduced map per system state ``s``, with the environment conditioned on ``s``."""
    return [
        product_case_map(channel, conditional_env_given_system(joint, s))
        for s in range(joint.d_s)
    ]


def naive_map(channel, joint):
    """
    The state-to-state map an observer infers without touching the system:
    column ``s`` is the output for input ``s`` with the environment conditioned
    on that input.
    """
    _check_dims(channel, joint)
    g = channel.reduced_tensor()
    columns = [
        g[:, s, :] @ conditional_env_given_system(joint, s).entries for s in range(joint.d_s)
    ]
    return StochMatrix(np.column_stack(columns))


def conditional_map_discrepancy(channel, joint):
    """
    Largest induced L1 distance between the conditional maps of two system
    states; zero exactly when all of them agree.
    """
    _check_dims(channel, joint)
    maps = conditional_maps(channel, joint)
    worst = 0.0
    for a, b in combinations(maps, 2):
        worst = max(worst, float(np.linalg.norm(a.entries - b.entries, 1)))
    return worst


def product_case_map(channel, t):
    """Reduced map when the environment enters independently in state ``t``."""
    if t.dim != channel.d_e:
        raise DimensionMismatchError(
            f"environment state of dimension {t.dim} for a channel with d_E = {channel.d_e}"
        )
    return StochMatrix(channel.reduced_tensor() @ t.entries)


def apply_preparation(xi, joint):
    """Act with ``xi`` on the system alone: ``(xi (x) I) P``."""
    _require_stochastic_on(xi, joint.d_s)
    out = xi.entries @ joint.entries
    if isinstance(xi, StochMatrix) and isinstance(joint, JointDist):
        return JointDist(out)
    return SubJointDist(out)


def process_output(channel, joint, xi):
    """System output when the experimenter applies ``xi`` before the machine."""
    _check_dims(channel, joint)
    if not isinstance(xi, StochMatrix):
        raise InvalidDistributionError('process_output needs a stochastic preparation')
    prepared = apply_preparation(xi, joint)
    return marginal_system(channel.act(prepared))


def theta_from_basis(channel, joint):
    """Tabulate the process on every measure-and-prepare operation ``E_jk``."""
    _check_dims(channel, joint)
    # (E_jk (x) I) P puts row k of P into row j; the channel then sees (j, e)
    outputs = np.einsum('aje,ke->jka', channel.reduced_tensor(), joint.entries)
    return ProcessMap(outputs, marginal_system(joint))


def theta_apply(process, xi):
    """Predict the output for preparation ``xi`` as sum_jk xi_jk Theta[E_jk]."""
    _require_stochastic_on(xi, process.dim)
    if process.estimated:
        nu, _ = process.normalised_outputs()
        return ProbVec(np.einsum('jk,k,jka->a', xi.entries, process.marginal.entries, nu))
    return ProbVec(np.einsum('jk,jka->a', xi.entries, process.basis_outputs))


def basis_operation(j, k, dim):
    return SubStochMatrix.unit(j, k, dim)


def expansion_coefficients(xi):
    """Coefficients ``x^(j,k)`` of ``xi`` in the matrix-unit basis; they are its entries."""
    return np.array(xi.entries)


def _check_dims(channel, joint):
    if (channel.d_s, channel.d_e) != (joint.d_s, joint.d_e):
        raise DimensionMismatchError(
            f"channel on {channel.d_s}x{channel.d_e} with a {joint.d_s}x{joint.d_e} joint state"
        )
