"""Seeded random instances drawn from the flat Dirichlet distribution."""
import numpy as np

from .distributions import JointDist, ProbVec, StochMatrix


def make_rng(seed, *keys):
    """Generator keyed by a master seed plus any number of non-negative ints."""
    return np.random.default_rng([int(seed), *(int(k) for k in keys)])


def random_prob_vec(rng, dim):
    return ProbVec(rng.dirichlet(np.ones(dim)))


def random_stochastic(rng, d_out, d_in=None):
    d_in = d_out if d_in is None else d_in
    return StochMatrix(rng.dirichlet(np.ones(d_out), size=d_in).T)


def random_joint(rng, d_s, d_e):
    return JointDist(rng.dirichlet(np.ones(d_s * d_e)).reshape(d_s, d_e))
