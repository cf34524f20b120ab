"""
Joint system-environment channels.

A channel is a stochastic matrix on the composite space, indexed system-major
(``i = s * d_E + e``). Permutation channels cover the two-coin machines used in
the worked examples: SWAP hands the environment coin to the system, and the
modular adder (CNOT for two-state coins) flips the system when the environment
reads 1.
"""
from dataclasses import dataclass
from itertools import product

import numpy as np

from probability.distributions import JointDist, StochMatrix
from probability.exceptions import DimensionMismatchError

LAYOUT = 'system-major'


@dataclass(frozen=True, eq=False)
class JointChannel:
    gamma: StochMatrix
    d_s: int
    d_e: int

    def __post_init__(self):
        gamma = self.gamma if isinstance(self.gamma, StochMatrix) else StochMatrix(self.gamma)
        size = self.d_s * self.d_e
        if gamma.shape != (size, size):
            raise DimensionMismatchError(
                f"channel matrix {gamma.shape} does not act on {self.d_s}x{self.d_e} composites"
            )
        object.__setattr__(self, 'gamma', gamma)

    @property
    def layout(self):
        return LAYOUT

    def act(self, joint):
        """Push a (possibly sub-normalised) joint distribution through the channel."""
        if (joint.d_s, joint.d_e) != (self.d_s, self.d_e):
            raise DimensionMismatchError(
                f"channel on {self.d_s}x{self.d_e} cannot act on {joint.d_s}x{joint.d_e}"
            )
        out = self.gamma.entries @ joint.vector
        return type(joint).from_vector(out, self.d_s, self.d_e)

    def reduced_tensor(self):
        """
        Array ``G[a, s, e]``: probability that the system leaves in state ``a``
        when the pair enters as ``(s, e)``, environment output traced out.
        """
        g = self.gamma.entries.reshape(self.d_s, self.d_e, self.d_s, self.d_e)
        return g.sum(axis=1)


def permutation_channel(rule, d_s, d_e):
    """Deterministic channel sending ``(s, e)`` to ``rule(s, e)``."""
    perm = []
    for s, e in product(range(d_s), range(d_e)):
        s_out, e_out = rule(s, e)
        perm.append(s_out * d_e + e_out)
    if sorted(perm) != list(range(d_s * d_e)):
        raise ValueError('rule is not a bijection on the composite space')
    return JointChannel(StochMatrix.from_permutation(perm), d_s, d_e)


def identity_channel(d_s, d_e):
    return JointChannel(StochMatrix.identity(d_s * d_e), d_s, d_e)


def swap_channel(dim=2):
    return permutation_channel(lambda s, e: (e, s), dim, dim)


def adder_channel(dim=2):
    """``s' = s + e (mod dim)``, environment untouched."""
    return permutation_channel(lambda s, e: ((s + e) % dim, e), dim, dim)


def cnot_channel():
    return adder_channel(2)


def random_channel(rng, d_s, d_e):
    size = d_s * d_e
    return JointChannel(StochMatrix(rng.dirichlet(np.ones(size), size=size).T), d_s, d_e)


def maximally_correlated(dim=2):
    """Perfectly correlated coins: ``diag(1/d, ..., 1/d)``."""
    return JointDist(np.eye(dim) / dim)
