"""Shannon entropy and Kullback-Leibler divergence, in nats unless asked otherwise."""
import math

import numpy as np

from .exceptions import DimensionMismatchError

UNITS = ('nats', 'bits')


def convert(value, units='nats'):
    """Express a quantity given in nats in ``units``; infinities pass through."""
    if units == 'nats':
        return value
    if units == 'bits':
        return value / math.log(2)
    raise ValueError(f"unknown units {units!r}")


def entropy(p, units='nats'):
    """Shannon entropy with the convention 0 ln 0 = 0."""
    x = p.entries[p.entries > 0]
    return convert(float(-np.sum(x * np.log(x))), units)


def kl(p, q, units='nats'):
    """
    Relative entropy sum_i p_i ln(p_i / q_i).

    Terms with p_i = 0 contribute nothing; p_i > 0 with q_i = 0 makes the
    divergence +inf.
    """
    if p.dim != q.dim:
        raise DimensionMismatchError(f"kl between dimensions {p.dim} and {q.dim}")
    mask = p.entries > 0
    if np.any(q.entries[mask] == 0):
        return math.inf
    x = p.entries[mask]
    value = float(np.sum(x * np.log(x / q.entries[mask])))
    return convert(max(value, 0.0), units)
