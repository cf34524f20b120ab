import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from probability.distributions import (
    JointDist,
    ProbVec,
    StochMatrix,
    SubJointDist,
    SubStochMatrix,
    apply,
    is_product,
    marginal_env,
    marginal_system,
)
from probability.exceptions import DimensionMismatchError, InvalidDistributionError, ZeroMarginalError
from probability.generators import make_rng, random_prob_vec, random_stochastic

from .channels import (
    JointChannel,
    adder_channel,
    cnot_channel,
    identity_channel,
    maximally_correlated,
    permutation_channel,
    swap_channel,
)
from .instances import random_instance
from .process import (
    ProcessMap,
    apply_preparation,
    basis_operation,
    conditional_map_discrepancy,
    conditional_maps,
    expansion_coefficients,
    naive_map,
    process_output,
    product_case_map,
    theta_apply,
    theta_from_basis,
)
from .serializers import InstanceSerializer, JointChannelSerializer, ProcessMapSerializer

NOT = StochMatrix.from_permutation([1, 0])
DIAG = maximally_correlated(2)


def l1(a, b):
    return float(np.abs(np.asarray(getattr(a, 'entries', a)) - np.asarray(getattr(b, 'entries', b))).sum())


class ChannelTests(SimpleTestCase):
    def test_swap_exchanges_the_coins(self):
        out = swap_channel().act(JointDist([[0.1, 0.2], [0.3, 0.4]]))
        np.testing.assert_allclose(out.entries, [[0.1, 0.3], [0.2, 0.4]])

    def test_cnot_flips_system_when_environment_reads_one(self):
        out = cnot_channel().act(JointDist([[0.1, 0.2], [0.3, 0.4]]))
        np.testing.assert_allclose(out.entries, [[0.1, 0.4], [0.3, 0.2]])

    def test_adder_on_three_states(self):
        channel = adder_channel(3)
        np.testing.assert_allclose(channel.reduced_tensor()[:, 2, 2], [0, 1, 0])

    def test_rule_must_be_a_bijection(self):
        with self.assertRaises(ValueError):
            permutation_channel(lambda s, e: (0, 0), 2, 2)

    def test_shape_must_match_dimensions(self):
        with self.assertRaises(DimensionMismatchError):
            JointChannel(StochMatrix.identity(4), 2, 3)

    def test_sub_normalised_input_stays_sub_normalised(self):
        out = swap_channel().act(SubJointDist([[0.5, 0], [0, 0]]))
        self.assertIsInstance(out, SubJointDist)
        self.assertNotIsInstance(out, JointDist)
        self.assertAlmostEqual(out.mass, 0.5)


class NaiveMapTests(SimpleTestCase):
    def test_swap_on_perfectly_correlated_coins_looks_like_identity(self):
        self.assertTrue(naive_map(swap_channel(), DIAG).isclose(StochMatrix.identity(2)))

    def test_identity_channel(self):
        joint = JointDist([[0.1, 0.2], [0.3, 0.4]])
        self.assertTrue(naive_map(identity_channel(2, 2), joint).isclose(StochMatrix.identity(2)))

    def test_swap_on_product_state_emits_environment(self):
        joint = JointDist.product(ProbVec([0.5, 0.5]), ProbVec([0.3, 0.7]))
        m = naive_map(swap_channel(), joint)
        np.testing.assert_allclose(m.entries, [[0.3, 0.3], [0.7, 0.7]], atol=1e-15)

    def test_zero_system_marginal(self):
        with self.assertRaises(ZeroMarginalError):
            naive_map(swap_channel(), JointDist([[0.5, 0.5], [0, 0]]))

    def test_discrepancy_on_swap(self):
        self.assertAlmostEqual(conditional_map_discrepancy(swap_channel(), DIAG), 2.0, delta=1e-12)
        maps = conditional_maps(swap_channel(), DIAG)
        np.testing.assert_allclose(maps[0].entries, [[1, 1], [0, 0]])
        np.testing.assert_allclose(maps[1].entries, [[0, 0], [1, 1]])

    def test_identity_channel_ignores_correlations(self):
        self.assertEqual(conditional_map_discrepancy(identity_channel(2, 2), DIAG), 0.0)

    @given(st.integers(min_value=0, max_value=2 ** 32), st.sampled_from([(2, 2), (2, 3), (3, 2)]))
    @settings(max_examples=50, deadline=None)
    def test_product_states_have_a_state_to_state_map(self, seed, dims):
        rng = make_rng(seed)
        d_s, d_e = dims
        instance = random_instance(seed, d_s, d_e)
        t = random_prob_vec(rng, d_e)
        joint = JointDist.product(random_prob_vec(rng, d_s), t)
        self.assertLessEqual(conditional_map_discrepancy(instance.channel, joint), 1e-12)
        self.assertTrue(
            naive_map(instance.channel, joint).isclose(product_case_map(instance.channel, t), atol=1e-12)
        )


class ProductCaseMapTests(SimpleTestCase):
    def test_identity(self):
        m = product_case_map(identity_channel(2, 2), ProbVec([0.3, 0.7]))
        self.assertTrue(m.isclose(StochMatrix.identity(2)))

    def test_swap(self):
        m = product_case_map(swap_channel(), ProbVec([0.3, 0.7]))
        np.testing.assert_allclose(m.entries, [[0.3, 0.3], [0.7, 0.7]])

    def test_cnot_with_control_zero(self):
        m = product_case_map(cnot_channel(), ProbVec([1, 0]))
        self.assertTrue(m.isclose(StochMatrix.identity(2)))

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            product_case_map(cnot_channel(), ProbVec.uniform(3))


class PreparationTests(SimpleTestCase):
    def test_identity_leaves_state_alone(self):
        self.assertTrue(apply_preparation(StochMatrix.identity(2), DIAG).isclose(DIAG))

    def test_not_permutes_rows(self):
        out = apply_preparation(NOT, DIAG)
        self.assertIsInstance(out, JointDist)
        np.testing.assert_allclose(out.entries, [[0, 0.5], [0.5, 0]])

    def test_matrix_unit_post_selects(self):
        out = apply_preparation(SubStochMatrix.unit(0, 0, 2), DIAG)
        self.assertNotIsInstance(out, JointDist)
        np.testing.assert_allclose(out.entries, [[0.5, 0], [0, 0]])
        self.assertAlmostEqual(out.mass, 0.5)

    def test_environment_marginal_is_untouched(self):
        rng = make_rng(5)
        for _ in range(100):
            instance = random_instance(int(rng.integers(2 ** 32)), 3, 2)
            before = marginal_env(instance.joint)
            after = marginal_env(apply_preparation(instance.preparation, instance.joint))
            self.assertTrue(after.isclose(before, atol=1e-12))

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            apply_preparation(StochMatrix.identity(3), DIAG)


class ProcessOutputTests(SimpleTestCase):
    def test_swap_outputs_the_environment_marginal(self):
        rng = make_rng(1)
        for _ in range(10):
            q = process_output(swap_channel(), DIAG, random_stochastic(rng, 2))
            np.testing.assert_allclose(q.entries, [0.5, 0.5], atol=1e-15)

    def test_cnot_with_identity_and_not(self):
        np.testing.assert_allclose(process_output(cnot_channel(), DIAG, StochMatrix.identity(2)).entries, [1, 0])
        np.testing.assert_allclose(process_output(cnot_channel(), DIAG, NOT).entries, [0, 1])

    def test_requires_stochastic_preparation(self):
        with self.assertRaises(InvalidDistributionError):
            process_output(cnot_channel(), DIAG, SubStochMatrix.unit(0, 0, 2))


class ThetaTests(SimpleTestCase):
    def test_swap_basis_outputs(self):
        theta = theta_from_basis(swap_channel(), DIAG)
        for j in range(2):
            for k in range(2):
                expected = np.zeros(2)
                expected[k] = 0.5
                np.testing.assert_allclose(theta.output(j, k), expected)
        np.testing.assert_allclose(theta_apply(theta, StochMatrix.identity(2)).entries, [0.5, 0.5])

    def test_identity_channel_basis_outputs(self):
        joint = JointDist([[0.1, 0.2], [0.3, 0.4]])
        theta = theta_from_basis(identity_channel(2, 2), joint)
        p = marginal_system(joint)
        for j in range(2):
            for k in range(2):
                expected = np.zeros(2)
                expected[j] = p[k]
                np.testing.assert_allclose(theta.output(j, k), expected, atol=1e-15)
        xi = StochMatrix([[0.2, 0.6], [0.8, 0.4]])
        self.assertTrue(theta_apply(theta, xi).isclose(apply(xi, p), atol=1e-15))

    def test_masses_equal_the_marginal(self):
        instance = random_instance(9, 3, 2)
        theta = theta_from_basis(instance.channel, instance.joint)
        p = marginal_system(instance.joint)
        np.testing.assert_allclose(theta.masses, np.tile(p.entries, (3, 1)), atol=1e-12)

    def test_same_marginal_different_outputs(self):
        theta = theta_from_basis(cnot_channel(), DIAG)
        p = marginal_system(DIAG)
        self.assertTrue(apply(StochMatrix.identity(2), p).isclose(apply(NOT, p)))
        np.testing.assert_allclose(theta_apply(theta, StochMatrix.identity(2)).entries, [1, 0])
        np.testing.assert_allclose(theta_apply(theta, NOT).entries, [0, 1])

    def test_naive_map_mispredicts_by_two(self):
        theta = theta_from_basis(cnot_channel(), DIAG)
        p = marginal_system(DIAG)
        naive = apply(naive_map(cnot_channel(), DIAG), apply(NOT, p))
        np.testing.assert_allclose(naive.entries, [1, 0])
        self.assertAlmostEqual(l1(naive, theta_apply(theta, NOT)), 2.0, delta=1e-12)

    @given(st.integers(min_value=0, max_value=2 ** 32), st.sampled_from([(2, 2), (2, 3), (3, 2), (3, 3)]))
    @settings(max_examples=100, deadline=None)
    def test_tomography_is_exact(self, seed, dims):
        instance = random_instance(seed, *dims)
        theta = theta_from_basis(instance.channel, instance.joint)
        predicted = theta_apply(theta, instance.preparation)
        actual = process_output(instance.channel, instance.joint, instance.preparation)
        self.assertLessEqual(l1(predicted, actual), 1e-12)

    @given(st.integers(min_value=0, max_value=2 ** 32), st.floats(min_value=0, max_value=1))
    @settings(max_examples=50, deadline=None)
    def test_linearity(self, seed, alpha):
        rng = make_rng(seed)
        instance = random_instance(seed, 3, 2)
        theta = theta_from_basis(instance.channel, instance.joint)
        xi1, xi2 = random_stochastic(rng, 3), random_stochastic(rng, 3)
        mixed = StochMatrix(alpha * xi1.entries + (1 - alpha) * xi2.entries)
        expected = alpha * theta_apply(theta, xi1).entries + (1 - alpha) * theta_apply(theta, xi2).entries
        self.assertLessEqual(l1(theta_apply(theta, mixed), expected), 1e-12)

    def test_product_state_reduces_to_channel_on_environment(self):
        rng = make_rng(13)
        for _ in range(50):
            instance = random_instance(int(rng.integers(2 ** 32)), 2, 3)
            p, t = random_prob_vec(rng, 2), random_prob_vec(rng, 3)
            joint = JointDist.product(p, t)
            self.assertTrue(is_product(joint, 1e-12))
            theta = theta_from_basis(instance.channel, joint)
            expected = apply(product_case_map(instance.channel, t), apply(instance.preparation, p))
            self.assertLessEqual(l1(theta_apply(theta, instance.preparation), expected), 1e-12)

    def test_expansion_in_matrix_units(self):
        xi = StochMatrix([[0.2, 0.6], [0.8, 0.4]])
        x = expansion_coefficients(xi)
        rebuilt = sum(x[j, k] * basis_operation(j, k, 2).entries for j in range(2) for k in range(2))
        np.testing.assert_array_equal(rebuilt, xi.entries)
        swap = basis_operation(0, 1, 2).entries + basis_operation(1, 0, 2).entries
        np.testing.assert_array_equal(swap, NOT.entries)

    def test_process_map_rejects_wrong_masses(self):
        with self.assertRaises(InvalidDistributionError):
            ProcessMap(np.full((2, 2, 2), 0.5), ProbVec([0.5, 0.5]))

    def test_estimated_map_output_is_a_distribution(self):
        outputs = np.array([[[0.3, 0.2], [0.5, 0.0]], [[0.1, 0.4], [0.0, 0.5]]])
        theta = ProcessMap(outputs * 0.98, ProbVec([0.5, 0.5]), estimated=True)
        q = theta_apply(theta, StochMatrix.identity(2))
        self.assertAlmostEqual(sum(q), 1.0, places=12)


class SerializerTests(SimpleTestCase):
    def test_channel_round_trip(self):
        data = JointChannelSerializer(cnot_channel()).data
        self.assertEqual(data['layout'], 'system-major')
        rebuilt = JointChannelSerializer.build(dict(data))
        np.testing.assert_array_equal(rebuilt.gamma.entries, cnot_channel().gamma.entries)

    def test_process_map_vectors(self):
        theta = theta_from_basis(swap_channel(), DIAG)
        data = ProcessMapSerializer(theta).data
        self.assertEqual(len(data['basis_outputs']), 4)
        self.assertEqual(data['basis_outputs'][1], [0.0, 0.5])
        rebuilt = ProcessMapSerializer.build(dict(data))
        np.testing.assert_array_equal(rebuilt.basis_outputs, theta.basis_outputs)

    def test_instance_dimension_errors_name_the_field(self):
        serializer = InstanceSerializer(data={
            'channel': JointChannelSerializer(cnot_channel()).data,
            'joint': {'matrix': [[0.5, 0.5]]},
            'preparation': {'matrix': [[1, 0], [0, 1]]},
        })
        self.assertFalse(serializer.is_valid())
        self.assertIn('joint', serializer.errors)
