"""Hand-checkable examples: two correlated coins through SWAP and CNOT."""
import numpy as np

from dynamics.channels import cnot_channel, maximally_correlated, swap_channel
from dynamics.process import (
    conditional_map_discrepancy,
    naive_map,
    theta_apply,
    theta_from_basis,
)
from probability.distributions import ProbVec, StochMatrix, apply, marginal_system
from second_law.bounds import second_law_check, spohn_check
from second_law.fixed_points import fixed_point
from second_law.lifting import lift_theta

TOL = 1e-12

NOT = StochMatrix.from_permutation([1, 0])
LAZY = StochMatrix([[0.9, 0.5], [0.1, 0.5]])


def swap_demo():
    """SWAP on perfectly correlated coins looks like doing nothing to an observer."""
    joint = maximally_correlated(2)
    theta = theta_from_basis(swap_channel(), joint)
    lifted = lift_theta(theta)
    fp = fixed_point(lifted)
    naive = naive_map(swap_channel(), joint)
    discrepancy = conditional_map_discrepancy(swap_channel(), joint)
    q = theta_apply(theta, StochMatrix.identity(2))
    report = second_law_check(theta, StochMatrix.identity(2), lifted, fp)
    checks = {
        'naive_map_is_identity': naive.isclose(StochMatrix.identity(2), atol=TOL),
        'discrepancy_is_two': abs(discrepancy - 2.0) <= TOL,
        'output_is_uniform': q.isclose([0.5, 0.5], atol=TOL),
        'fixed_point_is_uniform': fp.epsilon.isclose(np.full(4, 0.25), atol=TOL),
        'second_law_holds': report.satisfied,
    }
    return {
        'naive_map': naive.tolist(),
        'conditional_map_discrepancy': discrepancy,
        'theta_basis_outputs': theta.basis_outputs.reshape(4, 2).tolist(),
        'output_identity_preparation': q.tolist(),
        'lifted_map': lifted.matrix.tolist(),
        'second_law': report,
        'checks': checks,
    }


def cnot_demo():
    """Two preparations with the same effect on the marginal, opposite outputs."""
    joint = maximally_correlated(2)
    theta = theta_from_basis(cnot_channel(), joint)
    lifted = lift_theta(theta)
    fp = fixed_point(lifted)
    p = marginal_system(joint)
    q_a = theta_apply(theta, StochMatrix.identity(2))
    q_b = theta_apply(theta, NOT)
    naive_b = apply(naive_map(cnot_channel(), joint), apply(NOT, p))
    report_a = second_law_check(theta, StochMatrix.identity(2), lifted, fp)
    report_b = second_law_check(theta, NOT, lifted, fp)
    checks = {
        'same_prepared_marginal': apply(StochMatrix.identity(2), p).isclose(apply(NOT, p), atol=TOL),
        'q_a_is_zero': q_a.isclose([1, 0], atol=TOL),
        'q_b_is_one': q_b.isclose([0, 1], atol=TOL),
        'naive_prediction_misses': float(np.abs(naive_b.entries - q_b.entries).sum()) >= 1.0,
        'second_law_holds': report_a.satisfied and report_b.satisfied,
    }
    return {
        'prepared_marginal_a': apply(StochMatrix.identity(2), p).tolist(),
        'prepared_marginal_b': apply(NOT, p).tolist(),
        'q_a': q_a.tolist(),
        'q_b': q_b.tolist(),
        'naive_prediction_b': naive_b.tolist(),
        'second_law_a': report_a,
        'second_law_b': report_b,
        'checks': checks,
    }


def spohn_demo():
    report = spohn_check(LAZY, ProbVec([1, 0]))
    checks = {
        'lhs': abs(report.lhs - 0.3251) <= 1e-3,
        'rhs': abs(report.rhs - 0.1609) <= 1e-3,
        'satisfied': report.satisfied,
    }
    return {'map': LAZY.tolist(), 'initial': [1.0, 0.0], 'second_law': report, 'checks': checks}


DEMOS = {
    'swap': swap_demo,
    'cnot': cnot_demo,
    'spohn': spohn_demo,
}
