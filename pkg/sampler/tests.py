import numpy as np
from django.test import SimpleTestCase, override_settings, tag

from dynamics.channels import cnot_channel, identity_channel, maximally_correlated, swap_channel
from dynamics.instances import random_instance
from dynamics.process import naive_map, process_output, theta_apply, theta_from_basis
from probability.distributions import JointDist, StochMatrix
from probability.generators import make_rng, random_stochastic

from .exceptions import ReconstructionError, SamplerError
from .reconstruction import EmpiricalProcess, cells_within_error_bars, reconstruct_theta
from .rng import SplitMix64, block, substream_seed, unit_block
from .serializers import EmpiricalProcessSerializer, RunConfigSerializer, histogram_dataset
from .simulation import (
    RunConfig,
    estimate_naive_map,
    estimate_output,
    estimate_process,
    sample_joint,
    simulate_basis_run,
    simulate_observed_run,
    simulate_prepared_run,
)

DIAG = maximally_correlated(2)


class SplitMix64Tests(SimpleTestCase):
    def test_reference_outputs(self):
        stream = SplitMix64(0)
        self.assertEqual(stream.next_u64(), 0xE220A8397B1DCDAF)
        self.assertEqual(stream.next_u64(), 0x6E789E6AA1B965F4)

    def test_block_matches_the_scalar_walk(self):
        stream = SplitMix64(2 ** 64 - 5)
        expected = [stream.next_u64() for _ in range(20)]
        self.assertEqual(block(2 ** 64 - 5, 0, 20).tolist(), expected)
        self.assertEqual(block(2 ** 64 - 5, 7, 3).tolist(), expected[7:10])

    def test_unit_block_matches_next_double(self):
        stream = SplitMix64(99)
        expected = [stream.next_double() for _ in range(50)]
        self.assertEqual(unit_block(99, 0, 50).tolist(), expected)
        self.assertTrue(all(0.0 <= u < 1.0 for u in expected))

    def test_substreams_are_master_outputs(self):
        master = SplitMix64(42)
        outputs = [master.next_u64() for _ in range(4)]
        self.assertEqual([substream_seed(42, i) for i in range(4)], outputs)


class RunTests(SimpleTestCase):
    def test_point_mass_is_always_drawn(self):
        joint = JointDist([[0, 0], [1, 0]])
        stream = SplitMix64(1)
        self.assertEqual({sample_joint(joint, stream) for _ in range(100)}, {(1, 0)})

    def test_identity_channel_outputs_the_prepared_state(self):
        stream = SplitMix64(3)
        joint = JointDist([[0.1, 0.2], [0.3, 0.4]])
        for _ in range(200):
            accepted, out = simulate_basis_run(identity_channel(2, 2), joint, 1, 0, stream)
            if accepted:
                self.assertEqual(out, 1)
            else:
                self.assertIsNone(out)

    def test_swap_outputs_the_measured_state(self):
        stream = SplitMix64(4)
        for _ in range(200):
            accepted, out = simulate_basis_run(swap_channel(), DIAG, 0, 1, stream)
            if accepted:
                self.assertEqual(out, 1)

    def test_observed_and_prepared_runs(self):
        stream = SplitMix64(5)
        for _ in range(100):
            s, out = simulate_observed_run(cnot_channel(), DIAG, stream)
            self.assertEqual(out, 0)
            self.assertIn(s, (0, 1))
            self.assertEqual(simulate_prepared_run(cnot_channel(), DIAG, StochMatrix.from_permutation([1, 0]), stream), 1)

    def test_every_run_reads_two_uniforms(self):
        stream = SplitMix64(6)
        simulate_basis_run(swap_channel(), DIAG, 0, 0, stream)
        simulate_basis_run(swap_channel(), DIAG, 0, 0, stream)
        reference = SplitMix64(6)
        for _ in range(4):
            reference.next_u64()
        self.assertEqual(stream.state, reference.state)


class RunConfigTests(SimpleTestCase):
    def test_samples_must_be_positive(self):
        with self.assertRaises(SamplerError):
            RunConfig(0, 1, 2, 2)

    def test_seed_range(self):
        RunConfig(1, 2 ** 64 - 1, 2, 2)
        with self.assertRaises(SamplerError):
            RunConfig(1, 2 ** 64, 2, 2)

    def test_serializer_names_the_field(self):
        serializer = RunConfigSerializer(data={'samples': 0, 'seed': 1, 'dim_system': 2, 'dim_env': 2})
        self.assertFalse(serializer.is_valid())
        self.assertIn('samples', serializer.errors)


class EstimateProcessTests(SimpleTestCase):
    def test_matches_the_scalar_simulator(self):
        instance = random_instance(8, 2, 3)
        cfg = RunConfig(3000, 12345, 2, 3)
        empirical = estimate_process(instance.channel, instance.joint, cfg)
        for j, k in [(0, 0), (1, 0), (0, 1)]:
            stream = SplitMix64(substream_seed(cfg.seed, j * 2 + k))
            hist = np.zeros(2, dtype=np.int64)
            for _ in range(cfg.samples):
                accepted, out = simulate_basis_run(instance.channel, instance.joint, j, k, stream)
                if accepted:
                    hist[out] += 1
            np.testing.assert_array_equal(empirical.histogram(j, k), hist)

    @override_settings(CORRSTOCH={'SAMPLER_CHUNK': 1000})
    def test_chunking_and_workers_do_not_change_the_result(self):
        instance = random_instance(10, 3, 2)
        cfg = RunConfig(5000, 77, 3, 2)
        chunked = estimate_process(instance.channel, instance.joint, cfg)
        threaded = estimate_process(instance.channel, instance.joint, cfg, workers=4)
        np.testing.assert_array_equal(chunked.counts, threaded.counts)
        with self.settings(CORRSTOCH={'SAMPLER_CHUNK': 2 ** 18}):
            whole = estimate_process(instance.channel, instance.joint, cfg)
        np.testing.assert_array_equal(chunked.counts, whole.counts)
        np.testing.assert_array_equal(chunked.accepted, whole.accepted)

    def test_acceptance_concentrates_at_the_marginal(self):
        n = 10 ** 5
        empirical = estimate_process(swap_channel(), DIAG, RunConfig(n, 2024, 2, 2))
        tol = 5 * np.sqrt(0.25 / n)
        for j in range(2):
            for k in range(2):
                self.assertAlmostEqual(empirical.acceptance_rate(j, k), 0.5, delta=tol)

    def test_estimates_converge(self):
        instance = random_instance(21, 2, 2)
        exact = theta_from_basis(instance.channel, instance.joint)
        fractions = [
            cells_within_error_bars(
                estimate_process(instance.channel, instance.joint, RunConfig(5000, seed, 2, 2)), exact
            )
            for seed in range(100)
        ]
        self.assertGreaterEqual(np.mean(fractions), 0.99)

    @tag('slow')
    def test_swap_convergence_at_full_scale(self):
        exact = theta_from_basis(swap_channel(), DIAG)
        fractions = []
        for seed in range(100):
            empirical = estimate_process(swap_channel(), DIAG, RunConfig(10 ** 6, seed, 2, 2))
            fractions.append(cells_within_error_bars(empirical, exact))
        self.assertGreaterEqual(np.mean(fractions), 0.99)
        again = estimate_process(swap_channel(), DIAG, RunConfig(10 ** 6, 99, 2, 2))
        np.testing.assert_array_equal(again.counts, empirical.counts)

    def test_swap_tomography(self):
        empirical = estimate_process(swap_channel(), DIAG, RunConfig(10 ** 6, 7, 2, 2))
        theta = reconstruct_theta(empirical)
        rng = make_rng(7)
        for _ in range(20):
            q = theta_apply(theta, random_stochastic(rng, 2))
            self.assertLessEqual(np.abs(q.entries - 0.5).sum(), 0.01)

    def test_naive_map_and_output_estimates(self):
        instance = random_instance(30, 2, 2)
        joint = JointDist([[0.3, 0.2], [0.1, 0.4]])
        cfg = RunConfig(200000, 3, 2, 2)
        naive = estimate_naive_map(instance.channel, joint, cfg)
        self.assertTrue(naive.isclose(naive_map(instance.channel, joint), atol=0.01))
        q = estimate_output(instance.channel, joint, instance.preparation, cfg)
        exact = process_output(instance.channel, joint, instance.preparation)
        self.assertTrue(q.isclose(exact, atol=0.01))


class ReconstructionTests(SimpleTestCase):
    def test_exact_counts_give_the_exact_process(self):
        counts = np.zeros((2, 2, 2), dtype=int)
        for j in range(2):
            for k in range(2):
                counts[j, k, k] = 500
        empirical = EmpiricalProcess(counts, np.full((2, 2), 500), 1000, 0)
        theta = reconstruct_theta(empirical)
        np.testing.assert_array_equal(theta.basis_outputs, theta_from_basis(swap_channel(), DIAG).basis_outputs)
        np.testing.assert_array_equal(theta.marginal.entries, [0.5, 0.5])
        self.assertTrue(theta.estimated)

    def test_unreachable_cell_is_named(self):
        joint = JointDist([[0.5, 0.5], [0, 0]])
        empirical = estimate_process(cnot_channel(), joint, RunConfig(100, 1, 2, 2))
        with self.assertRaises(ReconstructionError) as ctx:
            reconstruct_theta(empirical)
        self.assertEqual(ctx.exception.cell, (0, 1))
        self.assertIn('(0, 1)', str(ctx.exception))

    def test_inconsistent_tallies(self):
        with self.assertRaises(ValueError):
            EmpiricalProcess(np.ones((2, 2, 2)), np.ones((2, 2)), 10, 0)


class ExportTests(SimpleTestCase):
    def test_round_trip_and_csv(self):
        empirical = estimate_process(swap_channel(), DIAG, RunConfig(100, 9, 2, 2))
        data = EmpiricalProcessSerializer(empirical).data
        self.assertEqual(data['seed'], 9)
        rebuilt = EmpiricalProcessSerializer.build(data)
        np.testing.assert_array_equal(rebuilt.counts, empirical.counts)

        csv = histogram_dataset(empirical).export('csv')
        self.assertTrue(csv.startswith('j,k,samples,accepted,out_0,out_1'))
        self.assertEqual(len(csv.strip().splitlines()), 5)
