import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from .distributions import (
    JointDist,
    ProbVec,
    StochMatrix,
    SubStochMatrix,
    apply,
    conditional_env_given_system,
    infer_stochastic_map,
    is_product,
    marginal_env,
    marginal_system,
)
from .exceptions import (
    DimensionMismatchError,
    InvalidDistributionError,
    NotStochasticError,
    RankDeficientError,
    ZeroMarginalError,
)
from .generators import make_rng, random_joint, random_prob_vec, random_stochastic
from .information import entropy, kl
from .serializers import JointDistSerializer, ProbVecField, StochMatrixSerializer

LAZY = StochMatrix([[0.9, 0.5], [0.1, 0.5]])


class ProbVecTests(SimpleTestCase):
    def test_tiny_negative_entries_are_clamped_and_renormalised(self):
        p = ProbVec([0.5 + 5e-13, -5e-13, 0.5])
        self.assertEqual(p[1], 0.0)
        self.assertAlmostEqual(sum(p), 1.0, places=15)

    def test_real_negative_entry_is_rejected(self):
        with self.assertRaises(InvalidDistributionError):
            ProbVec([1.1, -0.1])

    def test_bad_total_is_rejected(self):
        with self.assertRaises(InvalidDistributionError):
            ProbVec([0.5, 0.6])

    def test_clamping_away_all_mass_is_rejected(self):
        for entries in ([-5e-13, 0.0], [-1e-13, -1e-13, 0.0]):
            with self.assertRaises(InvalidDistributionError):
                ProbVec(entries)

    def test_nan_is_rejected(self):
        with self.assertRaises(InvalidDistributionError):
            ProbVec([math.nan, 1.0])

    def test_entries_are_read_only(self):
        p = ProbVec([0.3, 0.7])
        with self.assertRaises(ValueError):
            p.entries[0] = 1.0


class StochMatrixTests(SimpleTestCase):
    def test_column_sums_must_be_one(self):
        with self.assertRaises(NotStochasticError):
            StochMatrix([[0.9, 0.5], [0.2, 0.5]])

    def test_substochastic_allows_mass_below_one(self):
        unit = SubStochMatrix.unit(0, 1, 2)
        np.testing.assert_array_equal(unit.entries, [[0.0, 1.0], [0.0, 0.0]])
        with self.assertRaises(NotStochasticError):
            StochMatrix(unit.entries)

    def test_permutation_constructor(self):
        flip = StochMatrix.from_permutation([1, 0])
        np.testing.assert_array_equal(flip.entries, [[0, 1], [1, 0]])


class ApplyTests(SimpleTestCase):
    def test_identity(self):
        q = apply(StochMatrix.identity(2), ProbVec([0.3, 0.7]))
        np.testing.assert_allclose(q.entries, [0.3, 0.7])

    def test_column_read_off(self):
        np.testing.assert_allclose(apply(LAZY, ProbVec([1, 0])).entries, [0.9, 0.1])

    def test_stationary_vector_is_fixed(self):
        p = ProbVec([5 / 6, 1 / 6])
        np.testing.assert_allclose(apply(LAZY, p).entries, p.entries, atol=1e-15)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            apply(LAZY, ProbVec.uniform(3))

    @given(st.integers(min_value=0, max_value=2 ** 32), st.sampled_from([2, 3, 5]))
    @settings(max_examples=50, deadline=None)
    def test_output_is_always_a_distribution(self, seed, dim):
        rng = make_rng(seed)
        q = apply(random_stochastic(rng, dim), random_prob_vec(rng, dim))
        self.assertGreaterEqual(q.entries.min(), 0.0)
        self.assertAlmostEqual(q.entries.sum(), 1.0, places=9)


class InferStochasticMapTests(SimpleTestCase):
    def test_basis_inputs(self):
        m = infer_stochastic_map(
            [ProbVec.point(2, 0), ProbVec.point(2, 1)],
            [ProbVec([0.9, 0.1]), ProbVec([0.5, 0.5])],
        )
        np.testing.assert_allclose(m.entries, LAZY.entries)

    def test_dependent_inputs(self):
        with self.assertRaises(RankDeficientError):
            infer_stochastic_map(
                [ProbVec.point(2, 0), ProbVec.point(2, 0)],
                [ProbVec([0.9, 0.1]), ProbVec([0.5, 0.5])],
            )

    def test_negative_output_is_not_a_stochastic_map(self):
        with self.assertRaises(NotStochasticError) as ctx:
            infer_stochastic_map(
                [ProbVec.point(2, 0), ProbVec.point(2, 1)], [[1.2, -0.2], [0.0, 1.0]]
            )
        self.assertIn('not describable by a stochastic map', str(ctx.exception))

    def test_reproduces_random_maps_from_basis_evaluation(self):
        rng = make_rng(7)
        for dim in (2, 3, 5):
            m = random_stochastic(rng, dim)
            basis = [ProbVec.point(dim, j) for j in range(dim)]
            recovered = infer_stochastic_map(basis, [apply(m, u) for u in basis])
            self.assertTrue(recovered.isclose(m, atol=1e-12))

    def test_non_basis_inputs(self):
        rng = make_rng(11)
        m = random_stochastic(rng, 3)
        inputs = [random_prob_vec(rng, 3) for _ in range(3)]
        recovered = infer_stochastic_map(inputs, [apply(m, p) for p in inputs])
        self.assertTrue(recovered.isclose(m, atol=1e-9))


class JointDistTests(SimpleTestCase):
    def test_marginals(self):
        np.testing.assert_allclose(
            marginal_system(JointDist([[0.5, 0], [0, 0.5]])).entries, [0.5, 0.5]
        )
        np.testing.assert_allclose(
            marginal_env(JointDist([[0.4, 0.1], [0.1, 0.4]])).entries, [0.5, 0.5]
        )
        np.testing.assert_allclose(marginal_system(JointDist([[1, 0], [0, 0]])).entries, [1, 0])

    def test_conditionals(self):
        p = JointDist([[0.4, 0.1], [0.1, 0.4]])
        np.testing.assert_allclose(conditional_env_given_system(p, 0).entries, [0.8, 0.2])
        diag = JointDist([[0.5, 0], [0, 0.5]])
        np.testing.assert_allclose(conditional_env_given_system(diag, 1).entries, [0, 1])
        t = ProbVec([0.3, 0.7])
        prod = JointDist.product(ProbVec([0.2, 0.8]), t)
        for s in range(2):
            self.assertTrue(conditional_env_given_system(prod, s).isclose(t, atol=1e-15))

    def test_conditioning_on_zero_marginal(self):
        with self.assertRaises(ZeroMarginalError) as ctx:
            conditional_env_given_system(JointDist([[1, 0], [0, 0]]), 1)
        self.assertEqual(ctx.exception.index, 1)

    def test_is_product(self):
        self.assertTrue(is_product(JointDist.product(ProbVec([0.5, 0.5]), ProbVec([0.3, 0.7])), 1e-12))
        diag = JointDist([[0.5, 0], [0, 0.5]])
        self.assertFalse(is_product(diag, 1e-9))
        self.assertTrue(is_product(diag, 0.5))

    def test_marginal_conditional_consistency(self):
        rng = make_rng(3)
        for _ in range(200):
            joint = random_joint(rng, 3, 2)
            p = marginal_system(joint)
            mixed = sum(p[s] * conditional_env_given_system(joint, s).entries for s in range(3))
            np.testing.assert_allclose(mixed, marginal_env(joint).entries, atol=1e-12)


class InformationTests(SimpleTestCase):
    def test_entropy(self):
        self.assertAlmostEqual(entropy(ProbVec.uniform(4)), math.log(4))
        self.assertEqual(entropy(ProbVec.point(3, 1)), 0.0)
        self.assertAlmostEqual(entropy(ProbVec([0.8, 0.2])), 0.50040, delta=1e-4)
        self.assertAlmostEqual(entropy(ProbVec.uniform(2), units='bits'), 1.0)

    def test_kl(self):
        p = ProbVec([0.5, 0.5])
        self.assertEqual(kl(p, p), 0.0)
        self.assertAlmostEqual(kl(p, ProbVec([0.25, 0.75])), 0.14384, delta=1e-4)
        self.assertEqual(kl(ProbVec([1, 0]), ProbVec([0, 1])), math.inf)
        self.assertAlmostEqual(kl(ProbVec([0, 1]), ProbVec([0.5, 0.5])), math.log(2), places=15)

    def test_kl_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            kl(ProbVec.uniform(2), ProbVec.uniform(3))

    @given(st.integers(min_value=0, max_value=2 ** 32), st.sampled_from([2, 3, 5]))
    @settings(max_examples=100, deadline=None)
    def test_kl_is_nonnegative_and_separates(self, seed, dim):
        rng = make_rng(seed)
        p, q = random_prob_vec(rng, dim), random_prob_vec(rng, dim)
        self.assertGreaterEqual(kl(p, q), 0.0)
        self.assertLessEqual(kl(p, p), 1e-20)

    def test_contractivity_under_random_maps(self):
        rng = make_rng(42)
        for trial in range(1000):
            dim = (2, 3, 5)[trial % 3]
            m = random_stochastic(rng, dim)
            p, q = random_prob_vec(rng, dim), random_prob_vec(rng, dim)
            self.assertLessEqual(kl(apply(m, p), apply(m, q)), kl(p, q) + 1e-9)


class SerializerTests(SimpleTestCase):
    def test_stochastic_matrix_round_trip(self):
        data = StochMatrixSerializer(LAZY).data
        self.assertEqual(data['convention'], 'column-stochastic')
        self.assertEqual((data['d_out'], data['d_in']), (2, 2))
        rebuilt = StochMatrixSerializer.build(dict(data))
        np.testing.assert_array_equal(rebuilt.entries, LAZY.entries)

    def test_matrix_errors_name_the_field(self):
        serializer = StochMatrixSerializer(data={'matrix': [[1.2, 0], [-0.2, 1]]})
        self.assertFalse(serializer.is_valid())
        self.assertIn('matrix', serializer.errors)

    def test_declared_dimensions_must_match(self):
        serializer = JointDistSerializer(data={'matrix': [[0.5, 0.5]], 'dim_system': 2})
        self.assertFalse(serializer.is_valid())
        self.assertIn('dim_system', serializer.errors)

    def test_prob_vec_field(self):
        field = ProbVecField()
        self.assertEqual(field.to_representation(ProbVec([0.25, 0.75])), [0.25, 0.75])
        self.assertEqual(field.to_internal_value([0.25, 0.75]).dim, 2)
