"""
Property suites run by ``corrstoch check``.

Each suite is a function ``(cfg, rng, trial) -> (passed, value)`` registered
with ``@suite``. ``value`` is the quantity the suite judges (a gap, an error,
a slack) and the summary keeps its worst case over all trials. Trials are
seeded by ``(seed, suite index, trial)`` so they can run in any order.
"""
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from django.conf import settings

from dynamics.channels import cnot_channel, maximally_correlated, swap_channel
from dynamics.instances import instance_from_rng
from dynamics.process import (
    conditional_map_discrepancy,
    naive_map,
    process_output,
    product_case_map,
    theta_apply,
    theta_from_basis,
)
from probability.distributions import (
    JointDist,
    ProbVec,
    StochMatrix,
    apply,
    conditional_env_given_system,
    infer_stochastic_map,
    marginal_env,
    marginal_system,
)
from probability.generators import random_joint, random_prob_vec, random_stochastic
from probability.information import kl
from sampler.reconstruction import cells_within_error_bars
from sampler.simulation import RunConfig, estimate_process
from second_law.bounds import kl_contractivity_check, second_law_check, spohn_check
from second_law.fixed_points import fixed_point
from second_law.lifting import lift_output, lift_theta, vectorize_prep

EXACT_TOL = 1e-12
RESIDUAL_TOL = 1e-10
PREPARATIONS_PER_INSTANCE = 100
INSTANCE_DIMS = ((2, 2), (2, 3), (3, 2), (3, 3))
MAP_DIMS = (2, 3, 5)

NOT = StochMatrix.from_permutation([1, 0])


@dataclass(frozen=True)
class Suite:
    name: str
    run: Callable
    worst: str = 'max'
    entropic: bool = False
    # None: cfg.trials
    trials: Callable = None

    def trial_count(self, cfg):
        return self.trials(cfg) if self.trials else cfg.trials


SUITES = []


def suite(name, worst='max', entropic=False, trials=None):
    def register(fn):
        SUITES.append(Suite(name, fn, worst, entropic, trials))
        return fn
    return register


def l1(a, b):
    return float(np.abs(np.asarray(getattr(a, 'entries', a)) - np.asarray(getattr(b, 'entries', b))).sum())


def _instance(rng, trial):
    return instance_from_rng(rng, *INSTANCE_DIMS[trial % len(INSTANCE_DIMS)])


@suite('kl_contractivity', worst='min', entropic=True)
def kl_contractivity(cfg, rng, trial):
    dim = MAP_DIMS[trial % len(MAP_DIMS)]
    gap = kl_contractivity_check(
        random_stochastic(rng, dim), random_prob_vec(rng, dim), random_prob_vec(rng, dim)
    )
    return gap >= -cfg.tolerance, gap


@suite('kl_identity', entropic=True)
def kl_identity(cfg, rng, trial):
    dim = MAP_DIMS[trial % len(MAP_DIMS)]
    p, q = random_prob_vec(rng, dim), random_prob_vec(rng, dim)
    same = kl(p, p)
    return same <= cfg.tolerance and kl(p, q) >= 0.0, same


@suite('marginal_consistency')
def marginal_consistency(cfg, rng, trial):
    d_s, d_e = INSTANCE_DIMS[trial % len(INSTANCE_DIMS)]
    joint = random_joint(rng, d_s, d_e)
    p = marginal_system(joint)
    mixed = sum(p[s] * conditional_env_given_system(joint, s).entries for s in range(d_s))
    err = float(np.max(np.abs(mixed - marginal_env(joint).entries)))
    return err <= EXACT_TOL, err


@suite('infer_roundtrip')
def infer_roundtrip(cfg, rng, trial):
    dim = MAP_DIMS[trial % len(MAP_DIMS)]
    m = random_stochastic(rng, dim)
    basis = [ProbVec.point(dim, j) for j in range(dim)]
    recovered = infer_stochastic_map(basis, [apply(m, u) for u in basis])
    err = float(np.max(np.abs(recovered.entries - m.entries)))
    return err <= EXACT_TOL, err


@suite('tomography_exactness')
def tomography_exactness(cfg, rng, trial):
    instance = _instance(rng, trial)
    theta = theta_from_basis(instance.channel, instance.joint)
    worst = 0.0
    for _ in range(PREPARATIONS_PER_INSTANCE):
        xi = random_stochastic(rng, instance.d_s)
        worst = max(worst, l1(theta_apply(theta, xi), process_output(instance.channel, instance.joint, xi)))
    return worst <= EXACT_TOL, worst


@suite('theta_linearity')
def theta_linearity(cfg, rng, trial):
    instance = _instance(rng, trial)
    theta = theta_from_basis(instance.channel, instance.joint)
    xi1, xi2 = random_stochastic(rng, instance.d_s), random_stochastic(rng, instance.d_s)
    alpha = float(rng.random())
    mixed = StochMatrix(alpha * xi1.entries + (1 - alpha) * xi2.entries)
    expected = alpha * theta_apply(theta, xi1).entries + (1 - alpha) * theta_apply(theta, xi2).entries
    err = l1(theta_apply(theta, mixed), expected)
    return err <= EXACT_TOL, err


@suite('product_reduction')
def product_reduction(cfg, rng, trial):
    instance = _instance(rng, trial)
    p, t = random_prob_vec(rng, instance.d_s), random_prob_vec(rng, instance.d_e)
    joint = JointDist.product(p, t)
    reduced = product_case_map(instance.channel, t)
    theta = theta_from_basis(instance.channel, joint)
    err = max(
        l1(theta_apply(theta, instance.preparation), apply(reduced, apply(instance.preparation, p))),
        conditional_map_discrepancy(instance.channel, joint),
        float(np.max(np.abs(naive_map(instance.channel, joint).entries - reduced.entries))),
    )
    return err <= EXACT_TOL, err


@suite('naive_map_failure', worst='min', trials=lambda cfg: 1)
def naive_map_failure(cfg, rng, trial):
    diag = maximally_correlated(2)
    theta = theta_from_basis(cnot_channel(), diag)
    p = marginal_system(diag)
    q_a = theta_apply(theta, StochMatrix.identity(2))
    q_b = theta_apply(theta, NOT)
    same_input = apply(StochMatrix.identity(2), p).isclose(apply(NOT, p), atol=EXACT_TOL)
    miss = l1(apply(naive_map(cnot_channel(), diag), apply(NOT, p)), q_b)
    swap_gap = conditional_map_discrepancy(swap_channel(), diag)
    passed = (
        same_input
        and q_a.isclose([1, 0], atol=EXACT_TOL)
        and q_b.isclose([0, 1], atol=EXACT_TOL)
        and miss >= 1.0
        and abs(swap_gap - 2.0) <= EXACT_TOL
    )
    return passed, miss


@suite('lift_validity')
def lift_validity(cfg, rng, trial):
    instance = _instance(rng, trial)
    lifted = lift_theta(theta_from_basis(instance.channel, instance.joint))
    drift = float(np.max(np.abs(lifted.matrix.entries.sum(axis=0) - 1.0)))
    residual = fixed_point(lifted).residual
    return drift <= EXACT_TOL and residual <= RESIDUAL_TOL, max(drift, residual)


@suite('lift_consistency')
def lift_consistency(cfg, rng, trial):
    instance = _instance(rng, trial)
    theta = theta_from_basis(instance.channel, instance.joint)
    lifted = lift_theta(theta)
    xi_up = vectorize_prep(instance.preparation, theta.marginal).entries
    q_up = lift_output(theta_apply(theta, instance.preparation))
    err = l1(lifted.matrix.entries @ xi_up.entries, q_up)
    return err <= EXACT_TOL, err


@suite('fixed_point_structure')
def fixed_point_structure(cfg, rng, trial):
    instance = _instance(rng, trial)
    eps = fixed_point(lift_theta(theta_from_basis(instance.channel, instance.joint))).epsilon
    d = instance.d_s
    grid = eps.entries.reshape(d, d)
    err = float(np.max(np.abs(grid - grid.sum(axis=1, keepdims=True) / d)))
    return err <= RESIDUAL_TOL, err


@suite('second_law', worst='min', entropic=True)
def second_law(cfg, rng, trial):
    instance = _instance(rng, trial)
    report = second_law_check(theta_from_basis(instance.channel, instance.joint), instance.preparation)
    ok = report.slack >= -cfg.tolerance or (report.slack == math.inf and report.degenerate)
    return ok, report.slack


@suite('second_law_equality', entropic=True)
def second_law_equality(cfg, rng, trial):
    d_s, d_e = INSTANCE_DIMS[trial % len(INSTANCE_DIMS)]
    instance = instance_from_rng(rng, d_s, d_e)
    # every row carries 1/d_s, so the system marginal is exactly uniform
    rows = rng.dirichlet(np.ones(d_e), size=d_s) / d_s
    theta = theta_from_basis(instance.channel, JointDist(rows))
    lifted = lift_theta(theta)
    fp = fixed_point(lifted)
    e = fp.epsilon.entries.reshape(d_s, d_s).sum(axis=1)
    xi = StochMatrix.constant(ProbVec(e), d_s)
    gap = abs(second_law_check(theta, xi, lifted, fp).slack)
    return gap <= cfg.tolerance, gap


@suite('spohn', worst='min', entropic=True)
def spohn(cfg, rng, trial):
    dim = MAP_DIMS[trial % len(MAP_DIMS)]
    report = spohn_check(random_stochastic(rng, dim), random_prob_vec(rng, dim))
    ok = report.slack >= -cfg.tolerance or (report.slack == math.inf and report.degenerate)
    return ok, report.slack


@suite('uniform_reduction')
def uniform_reduction(cfg, rng, trial):
    d_s, d_e = INSTANCE_DIMS[trial % len(INSTANCE_DIMS)]
    instance = instance_from_rng(rng, d_s, d_e)
    vec = vectorize_prep(instance.preparation, ProbVec.uniform(d_s)).entries.entries
    bitwise = np.array_equal(vec, instance.preparation.entries.reshape(-1) / d_s)
    theta = theta_from_basis(instance.channel, JointDist(rng.dirichlet(np.ones(d_e), size=d_s) / d_s))
    expected = np.kron(theta.basis_outputs.reshape(d_s * d_s, d_s) * d_s, np.full((1, d_s), 1.0 / d_s)).T
    err = float(np.max(np.abs(lift_theta(theta).matrix.entries - expected)))
    return bitwise and err <= EXACT_TOL, err


@suite('sampler_convergence', worst='min', trials=lambda cfg: settings.CORRSTOCH['SAMPLER_SEEDS'])
def sampler_convergence(cfg, rng, trial):
    diag = maximally_correlated(2)
    run = RunConfig(cfg.samples, int(rng.integers(2 ** 63)), 2, 2)
    empirical = estimate_process(swap_channel(), diag, run)
    again = estimate_process(swap_channel(), diag, run)
    exact = theta_from_basis(swap_channel(), diag)
    rates = empirical.accepted / run.samples
    band = 5 * math.sqrt(0.25 / run.samples)
    fraction = cells_within_error_bars(empirical, exact)
    passed = (
        np.array_equal(empirical.counts, again.counts)
        and bool(np.all(np.abs(rates - 0.5) <= band))
        and fraction >= 0.99
    )
    return passed, fraction
