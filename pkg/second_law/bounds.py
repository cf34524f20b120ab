"""
Entropy-production bounds.

Both checks compare an entropy change with ``-(after - before) . ln(fixed)``.
Where the fixed point vanishes on an index that the two distributions weight
differently the term is infinite: if the starting distribution carries the
excess there the bound is vacuous (``rhs = -inf``), otherwise ``rhs = +inf``.
Either way the report is marked degenerate.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from dynamics.process import theta_apply
from probability.distributions import apply
from probability.exceptions import DimensionMismatchError
from probability.information import entropy, kl

from .fixed_points import fixed_point, stationary_distribution
from .lifting import lift_output, lift_theta, vectorize_prep

SLACK_TOL = 1e-9
# |after_i - before_i| below this counts as equal on a zero of the fixed point
EQUAL_TOL = 1e-15


@dataclass(frozen=True)
class SecondLawReport:
    lhs: float
    rhs: float
    slack: float
    satisfied: bool
    degenerate: bool
    epsilon: list = field(default_factory=list)
    residual: float = 0.0
    unique: bool = True
    flags: list = field(default_factory=list)


def entropy_production_bound(before, after, fixed):
    """Return ``(rhs, degenerate)`` for ``-(after - before) . ln(fixed)``."""
    delta = after.entries - before.entries
    eps = fixed.entries
    zero = eps == 0
    moved = np.abs(delta) > EQUAL_TOL
    if np.any(zero & moved):
        if np.any(zero & moved & (delta < 0)):
            return -math.inf, True
        return math.inf, True
    live = ~zero
    return float(-np.sum(delta[live] * np.log(eps[live]))), False


def _report(before, after, fp, flags=()):
    lhs = entropy(after) - entropy(before)
    rhs, degenerate = entropy_production_bound(before, after, fp.epsilon)
    slack = lhs - rhs
    return SecondLawReport(
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        satisfied=bool(slack >= -SLACK_TOL or slack == math.inf),
        degenerate=degenerate,
        epsilon=fp.epsilon.tolist(),
        residual=fp.residual,
        unique=fp.unique,
        flags=list(flags),
    )


def second_law_check(process, xi, lifted=None, fixed=None):
    """
    Entropy production of the lifted process for preparation ``xi``.

    ``lifted`` and ``fixed`` may be passed in when many preparations are
    checked against the same process.
    """
    lifted = lifted or lift_theta(process)
    fixed = fixed or fixed_point(lifted)
    before = vectorize_prep(xi, process.marginal).entries
    after = lift_output(theta_apply(process, xi))
    return _report(before, after, fixed, lifted.flags)


def spohn_check(m, p, fixed=None):
    """The same bound for a plain stochastic map and its own fixed point."""
    if not m.is_square:
        raise DimensionMismatchError(f"Spohn's bound needs a square map, got {m.shape}")
    fixed = fixed or stationary_distribution(m)
    return _report(p, apply(m, p), fixed)


def kl_contractivity_check(m, p, q):
    """``kl(p, q) - kl(Mp, Mq)``; never below zero up to rounding."""
    before = kl(p, q)
    if before == math.inf:
        return math.inf
    return before - kl(apply(m, p), apply(m, q))
