import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from dynamics.channels import cnot_channel, identity_channel, maximally_correlated, swap_channel
from dynamics.instances import random_instance
from dynamics.process import ProcessMap, theta_apply, theta_from_basis
from probability.distributions import JointDist, ProbVec, StochMatrix
from probability.exceptions import DimensionMismatchError
from probability.generators import make_rng, random_prob_vec, random_stochastic
from sampler.reconstruction import EmpiricalProcess, reconstruct_theta
from sampler.simulation import RunConfig, estimate_process

from .bounds import (
    SLACK_TOL,
    SecondLawReport,
    entropy_production_bound,
    kl_contractivity_check,
    second_law_check,
    spohn_check,
)
from .fixed_points import fixed_point, stationary_distribution
from .lifting import lift_output, lift_theta, vectorize_prep
from .serializers import SecondLawReportSerializer

DIAG = maximally_correlated(2)
NOT = StochMatrix.from_permutation([1, 0])
LAZY = StochMatrix([[0.9, 0.5], [0.1, 0.5]])


class VectorizePrepTests(SimpleTestCase):
    def test_identity(self):
        v = vectorize_prep(StochMatrix.identity(2), ProbVec([0.5, 0.5]))
        np.testing.assert_array_equal(v.entries.entries, [0.5, 0, 0, 0.5])

    def test_not(self):
        v = vectorize_prep(NOT, ProbVec.uniform(2))
        np.testing.assert_array_equal(v.entries.entries, [0, 0.5, 0.5, 0])

    def test_marginal_weights_the_columns(self):
        xi = StochMatrix([[0.2, 0.6], [0.8, 0.4]])
        v = vectorize_prep(xi, ProbVec([0.25, 0.75]))
        self.assertAlmostEqual(v.entry(0, 1), 0.45)
        self.assertAlmostEqual(v.entry(1, 0), 0.2)

    def test_uniform_marginal_is_plain_vectorisation(self):
        rng = make_rng(17)
        for dim in (2, 3, 4):
            xi = random_stochastic(rng, dim)
            v = vectorize_prep(xi, ProbVec.uniform(dim))
            np.testing.assert_array_equal(v.entries.entries, xi.entries.reshape(-1) / dim)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            vectorize_prep(StochMatrix.identity(3), ProbVec.uniform(2))


class LiftTests(SimpleTestCase):
    def test_swap_columns(self):
        lifted = lift_theta(theta_from_basis(swap_channel(), DIAG))
        for j in range(2):
            for k in range(2):
                expected = np.kron(np.eye(2)[k], [0.5, 0.5])
                np.testing.assert_allclose(lifted.matrix.column(j * 2 + k), expected)
        self.assertEqual(lifted.flags, [])

    def test_identity_channel_columns(self):
        lifted = lift_theta(theta_from_basis(identity_channel(2, 3), random_instance(3, 2, 3).joint))
        for j in range(2):
            for k in range(2):
                np.testing.assert_allclose(
                    lifted.matrix.column(j * 2 + k), np.kron(np.eye(2)[j], [0.5, 0.5]), atol=1e-15
                )

    def test_zero_marginal_columns_are_flagged(self):
        joint = JointDist([[0.4, 0.6], [0.0, 0.0]])
        lifted = lift_theta(theta_from_basis(cnot_channel(), joint))
        self.assertEqual(lifted.flags, [(0, 1), (1, 1)])
        np.testing.assert_allclose(lifted.matrix.column(1), np.full(4, 0.25))

    def test_uniform_marginal_columns_scale_by_dimension(self):
        joint = JointDist([[0.3, 0.2], [0.1, 0.4]])
        theta = theta_from_basis(cnot_channel(), joint)
        lifted = lift_theta(theta)
        for j in range(2):
            for k in range(2):
                expected = np.kron(theta.output(j, k) * 2, [0.5, 0.5])
                np.testing.assert_allclose(lifted.matrix.column(j * 2 + k), expected, atol=1e-15)

    @given(st.integers(min_value=0, max_value=2 ** 32), st.sampled_from([(2, 2), (2, 3), (3, 2), (3, 3)]))
    @settings(max_examples=100, deadline=None)
    def test_lift_is_stochastic_and_consistent(self, seed, dims):
        instance = random_instance(seed, *dims)
        theta = theta_from_basis(instance.channel, instance.joint)
        lifted = lift_theta(theta)
        np.testing.assert_allclose(lifted.matrix.entries.sum(axis=0), 1.0, atol=1e-12)
        xi_up = vectorize_prep(instance.preparation, theta.marginal).entries
        q_up = lift_output(theta_apply(theta, instance.preparation))
        np.testing.assert_allclose(lifted.matrix.entries @ xi_up.entries, q_up.entries, atol=1e-12)


class FixedPointTests(SimpleTestCase):
    def test_swap_lift_fixes_the_uniform_vector(self):
        fp = fixed_point(lift_theta(theta_from_basis(swap_channel(), DIAG)))
        np.testing.assert_allclose(fp.epsilon.entries, np.full(4, 0.25), atol=1e-12)
        self.assertTrue(fp.unique)
        self.assertLessEqual(fp.residual, 1e-10)

    def test_identity_lift_is_not_unique(self):
        fp = fixed_point(lift_theta(theta_from_basis(identity_channel(2, 2), DIAG)))
        np.testing.assert_allclose(fp.epsilon.entries, np.full(4, 0.25), atol=1e-12)
        self.assertFalse(fp.unique)

    def test_stationary_distribution_of_lazy_chain(self):
        fp = stationary_distribution(LAZY)
        np.testing.assert_allclose(fp.epsilon.entries, [5 / 6, 1 / 6], atol=1e-12)

    def test_large_maps_use_power_iteration(self):
        rng = make_rng(23)
        m = random_stochastic(rng, 81)
        fp = stationary_distribution(m)
        self.assertLessEqual(fp.residual, 1e-10)
        self.assertTrue(fp.unique)

    @given(st.integers(min_value=0, max_value=2 ** 32), st.sampled_from([(2, 2), (2, 3), (3, 2), (3, 3)]))
    @settings(max_examples=100, deadline=None)
    def test_fixed_point_factorises(self, seed, dims):
        instance = random_instance(seed, *dims)
        fp = fixed_point(lift_theta(theta_from_basis(instance.channel, instance.joint)))
        d = instance.d_s
        eps = fp.epsilon.entries.reshape(d, d)
        e = eps.sum(axis=1)
        np.testing.assert_allclose(eps, np.outer(e, np.full(d, 1.0 / d)), atol=1e-10)
        self.assertLessEqual(fp.residual, 1e-10)


class SecondLawTests(SimpleTestCase):
    def test_swap_with_identity_preparation(self):
        report = second_law_check(theta_from_basis(swap_channel(), DIAG), StochMatrix.identity(2))
        self.assertAlmostEqual(report.lhs, math.log(2), places=12)
        self.assertAlmostEqual(report.rhs, 0.0, places=12)
        self.assertAlmostEqual(report.slack, math.log(2), places=12)
        self.assertTrue(report.satisfied)
        self.assertFalse(report.degenerate)

    def test_equality_at_the_fixed_point(self):
        rng = make_rng(29)
        for _ in range(20):
            instance = random_instance(int(rng.integers(2 ** 32)), 2, 2)
            joint = JointDist([[0.3, 0.2], [0.1, 0.4]])
            theta = theta_from_basis(instance.channel, joint)
            lifted = lift_theta(theta)
            fp = fixed_point(lifted)
            e = fp.epsilon.entries.reshape(2, 2).sum(axis=1)
            xi = StochMatrix.constant(ProbVec(e), 2)
            np.testing.assert_allclose(vectorize_prep(xi, theta.marginal).entries.entries, fp.epsilon.entries, atol=1e-10)
            report = second_law_check(theta, xi, lifted, fp)
            self.assertAlmostEqual(report.slack, 0.0, delta=1e-9)

    def test_random_instances_obey_the_bound(self):
        rng = make_rng(31)
        for trial in range(500):
            d_s, d_e = [(2, 2), (2, 3), (3, 2), (3, 3)][trial % 4]
            instance = random_instance(int(rng.integers(2 ** 32)), d_s, d_e)
            report = second_law_check(theta_from_basis(instance.channel, instance.joint), instance.preparation)
            self.assertTrue(report.satisfied, msg=f"trial {trial}: slack {report.slack}")
            self.assertTrue(report.slack >= -SLACK_TOL or (report.degenerate and report.slack == math.inf))

    def test_zero_fixed_point_entries_make_the_bound_vacuous(self):
        before = ProbVec([0.5, 0.5])
        after = ProbVec([1.0, 0.0])
        rhs, degenerate = entropy_production_bound(before, after, ProbVec([1.0, 0.0]))
        self.assertEqual(rhs, -math.inf)
        self.assertTrue(degenerate)
        rhs, degenerate = entropy_production_bound(after, after, ProbVec([1.0, 0.0]))
        self.assertEqual(rhs, 0.0)
        self.assertFalse(degenerate)

    def test_estimated_process(self):
        theta = theta_from_basis(swap_channel(), DIAG)
        noisy = ProcessMap(theta.basis_outputs * 0.99, theta.marginal, estimated=True)
        report = second_law_check(noisy, StochMatrix.identity(2))
        self.assertAlmostEqual(report.lhs, math.log(2), places=12)



class ReconstructedProcessTests(SimpleTestCase):
    def _reconstructed(self):
        # per-cell acceptance differs from the averaged marginal (0.5, 0.5)
        accepted = np.array([[40, 70], [60, 30]])
        counts = np.array([[[30, 10], [20, 50]], [[15, 45], [30, 0]]])
        return reconstruct_theta(EmpiricalProcess(counts, accepted, 100, 0))

    def test_lift_reproduces_theta_apply(self):
        theta = self._reconstructed()
        lifted = lift_theta(theta)
        for xi in (StochMatrix.identity(2), NOT, StochMatrix([[0.2, 0.6], [0.8, 0.4]])):
            xi_up = vectorize_prep(xi, theta.marginal).entries
            q_up = lift_output(theta_apply(theta, xi))
            np.testing.assert_allclose(lifted.matrix.entries @ xi_up.entries, q_up.entries, atol=1e-12)

    def test_output_weights_normalised_cells_by_the_marginal(self):
        theta = self._reconstructed()
        q = theta_apply(theta, StochMatrix.identity(2))
        # cells (0, 0) and (1, 1): 0.5 * (0.75, 0.25) + 0.5 * (1, 0)
        np.testing.assert_allclose(q.entries, [0.875, 0.125], atol=1e-12)

    def test_sampled_instances_obey_the_bound(self):
        rng = make_rng(37)
        for trial in range(100):
            d_s, d_e = [(2, 2), (2, 3), (3, 2), (3, 3)][trial % 4]
            instance = random_instance(int(rng.integers(2 ** 32)), d_s, d_e)
            joint = JointDist(rng.dirichlet(np.ones(d_e), size=d_s) / d_s)
            run = RunConfig(500, int(rng.integers(2 ** 32)), d_s, d_e)
            theta = reconstruct_theta(estimate_process(instance.channel, joint, run))
            lifted = lift_theta(theta)
            fp = fixed_point(lifted)
            e = fp.epsilon.entries.reshape(d_s, d_s).sum(axis=1)
            for xi in (instance.preparation, StochMatrix.constant(ProbVec(e), d_s)):
                report = second_law_check(theta, xi, lifted, fp)
                self.assertTrue(report.satisfied, msg=f"trial {trial}: slack {report.slack}")

class SpohnTests(SimpleTestCase):
    def test_worked_example(self):
        report = spohn_check(LAZY, ProbVec([1, 0]))
        self.assertAlmostEqual(report.lhs, 0.3251, delta=1e-3)
        self.assertAlmostEqual(report.rhs, 0.1609, delta=1e-3)
        self.assertTrue(report.satisfied)

    def test_fixed_point_input(self):
        report = spohn_check(LAZY, ProbVec([5 / 6, 1 / 6]))
        self.assertAlmostEqual(report.lhs, 0.0, delta=1e-12)
        self.assertAlmostEqual(report.rhs, 0.0, delta=1e-12)

    def test_identity_map(self):
        report = spohn_check(StochMatrix.identity(3), ProbVec([0.2, 0.3, 0.5]))
        self.assertEqual(report.lhs, 0.0)
        self.assertAlmostEqual(report.rhs, 0.0, delta=1e-15)
        self.assertFalse(report.unique)

    def test_random_maps(self):
        rng = make_rng(37)
        for trial in range(500):
            dim = (2, 3, 5)[trial % 3]
            report = spohn_check(random_stochastic(rng, dim), random_prob_vec(rng, dim))
            self.assertGreaterEqual(report.slack, -SLACK_TOL)

    def test_rectangular_map(self):
        with self.assertRaises(DimensionMismatchError):
            spohn_check(StochMatrix([[0.5, 0.5, 1.0], [0.5, 0.5, 0.0]]), ProbVec.uniform(3))


class ContractivityTests(SimpleTestCase):
    def test_identity(self):
        p, q = ProbVec([0.2, 0.8]), ProbVec([0.6, 0.4])
        self.assertEqual(kl_contractivity_check(StochMatrix.identity(2), p, q), 0.0)

    def test_constant_map_forgets_everything(self):
        p, q = ProbVec([0.2, 0.8]), ProbVec([0.6, 0.4])
        gap = kl_contractivity_check(StochMatrix.constant(ProbVec([0.3, 0.7]), 2), p, q)
        self.assertAlmostEqual(gap, 0.2 * math.log(0.2 / 0.6) + 0.8 * math.log(0.8 / 0.4), places=12)

    def test_infinite_divergence(self):
        self.assertEqual(
            kl_contractivity_check(LAZY, ProbVec([1, 0]), ProbVec([0, 1])), math.inf
        )

    @given(st.integers(min_value=0, max_value=2 ** 32), st.sampled_from([2, 3, 5]))
    @settings(max_examples=200, deadline=None)
    def test_random_maps_contract(self, seed, dim):
        rng = make_rng(seed)
        m = random_stochastic(rng, dim)
        self.assertGreaterEqual(
            kl_contractivity_check(m, random_prob_vec(rng, dim), random_prob_vec(rng, dim)), -1e-9
        )


class SerializerTests(SimpleTestCase):
    def test_infinities_and_units(self):
        report = spohn_check(LAZY, ProbVec([1, 0]))
        data = SecondLawReportSerializer(report, context={'units': 'bits'}).data
        self.assertAlmostEqual(data['lhs'], report.lhs / math.log(2))
        self.assertEqual(len(data['epsilon']), 2)

        vacuous = SecondLawReport(
            lhs=0.1, rhs=-math.inf, slack=math.inf, satisfied=True, degenerate=True
        )
        data = SecondLawReportSerializer(vacuous).data
        self.assertEqual(data['rhs'], '-inf')
        self.assertEqual(data['slack'], '+inf')
