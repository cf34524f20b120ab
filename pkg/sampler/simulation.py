"""
Monte Carlo simulation of the two-coin machine.

Every run reads exactly two uniforms from its stream: the first draws the
joint input state, the second draws the channel output (it is read and thrown
away when a basis run is rejected). Because of that the chunked numpy path
and the one-run-at-a-time functions see the same numbers and agree bit for
bit.

Basis preparations ``E_jk`` are realised by post-selection: runs where the
system is not found in ``k`` are discarded, the others have the system reset
to ``j`` before the channel acts.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from dynamics.process import apply_preparation
from probability.distributions import ProbVec, StochMatrix
from probability.exceptions import DimensionMismatchError

from .exceptions import ReconstructionError, SamplerError
from .reconstruction import EmpiricalProcess
from .rng import SEED_MAX, substream_seed, unit_block

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    samples: int
    seed: int
    d_s: int
    d_e: int

    def __post_init__(self):
        if int(self.samples) < 1:
            raise SamplerError(f"samples must be at least 1, got {self.samples}")
        if not 0 <= int(self.seed) <= SEED_MAX:
            raise SamplerError(f"seed {self.seed} is not a 64-bit unsigned integer")
        if self.d_s < 1 or self.d_e < 1:
            raise SamplerError(f"invalid dimensions {self.d_s}x{self.d_e}")

    @property
    def dims(self):
        return self.d_s, self.d_e


def _chunk_size():
    return getattr(settings, 'CORRSTOCH', {}).get('SAMPLER_CHUNK', 2 ** 18)


def _cdf(weights):
    cdf = np.cumsum(weights)
    return cdf / cdf[-1]


def _draw(cdf, u):
    # u < 1 == cdf[-1], so the index never runs past the end
    return np.searchsorted(cdf, u, side='right')


class _Machine:
    """Inverse-CDF tables for one (channel, joint state) pair."""

    def __init__(self, channel, joint):
        if (channel.d_s, channel.d_e) != (joint.d_s, joint.d_e):
            raise DimensionMismatchError(
                f"channel on {channel.d_s}x{channel.d_e} with a {joint.d_s}x{joint.d_e} joint state"
            )
        self.d_s, self.d_e = channel.d_s, channel.d_e
        self.input_cdf = _cdf(joint.vector)
        self.column_cdfs = np.array([_cdf(col) for col in channel.gamma.entries.T])

    def outputs(self, inputs, u):
        """System outputs of the channel for composite ``inputs``."""
        out = np.empty(len(inputs), dtype=np.int64)
        for i in np.unique(inputs):
            mask = inputs == i
            out[mask] = _draw(self.column_cdfs[i], u[mask])
        return out // self.d_e

    def output(self, i, u):
        return int(_draw(self.column_cdfs[i], u)) // self.d_e


def _uniform_pairs(seed, samples):
    chunk = _chunk_size()
    for start in range(0, samples, chunk):
        n = min(chunk, samples - start)
        u = unit_block(seed, 2 * start, 2 * n).reshape(n, 2)
        yield u[:, 0], u[:, 1]


def sample_joint(joint, stream):
    """Draw ``(s, e)`` with probability ``P(s, e)``; reads one uniform."""
    i = int(_draw(_cdf(joint.vector), stream.next_double()))
    return divmod(i, joint.d_e)


def simulate_basis_run(channel, joint, j, k, stream):
    """One run of ``E_jk``: returns ``(accepted, system output or None)``."""
    machine = _Machine(channel, joint)
    s, e = sample_joint(joint, stream)
    u = stream.next_double()
    if s != k:
        return False, None
    return True, machine.output(j * machine.d_e + e, u)


def simulate_observed_run(channel, joint, stream):
    """No intervention: returns the observed input ``s`` and the output."""
    machine = _Machine(channel, joint)
    s, e = sample_joint(joint, stream)
    return s, machine.output(s * machine.d_e + e, stream.next_double())


def simulate_prepared_run(channel, joint, xi, stream):
    """The experimenter applies ``xi`` first; returns the system output."""
    return simulate_observed_run(channel, apply_preparation(xi, joint), stream)[1]


def _basis_cell(machine, j, k, seed, samples):
    counts = np.zeros(machine.d_s, dtype=np.int64)
    accepted = 0
    for u_in, u_out in _uniform_pairs(seed, samples):
        s, e = np.divmod(_draw(machine.input_cdf, u_in), machine.d_e)
        keep = s == k
        accepted += int(keep.sum())
        out = machine.outputs(j * machine.d_e + e[keep], u_out[keep])
        counts += np.bincount(out, minlength=machine.d_s)
    return counts, accepted


def estimate_process(channel, joint, cfg, workers=1):
    """Run every basis preparation ``cfg.samples`` times on its own substream."""
    machine = _Machine(channel, joint)
    d = machine.d_s
    cells = [(j, k) for j in range(d) for k in range(d)]

    def run(cell):
        j, k = cell
        return _basis_cell(machine, j, k, substream_seed(cfg.seed, j * d + k), cfg.samples)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, cells))
    else:
        results = [run(cell) for cell in cells]

    counts = np.zeros((d, d, d), dtype=np.int64)
    accepted = np.zeros((d, d), dtype=np.int64)
    for (j, k), (hist, acc) in zip(cells, results):
        counts[j, k] = hist
        accepted[j, k] = acc
    logger.info(f"[SAMPLER] {len(cells)} cells x {cfg.samples} runs, seed {cfg.seed}")
    return EmpiricalProcess(counts, accepted, cfg.samples, cfg.seed)


def _observed_counts(machine, seed, samples):
    counts = np.zeros((machine.d_s, machine.d_s), dtype=np.int64)
    for u_in, u_out in _uniform_pairs(seed, samples):
        inputs = _draw(machine.input_cdf, u_in)
        out = machine.outputs(inputs, u_out)
        np.add.at(counts, (out, inputs // machine.d_e), 1)
    return counts


def estimate_naive_map(channel, joint, cfg):
    """
    What an observer who never touches the system reconstructs: output
    frequencies conditioned on the observed input. Tends to ``naive_map``.
    """
    machine = _Machine(channel, joint)
    counts = _observed_counts(machine, substream_seed(cfg.seed, machine.d_s ** 2), cfg.samples)
    seen = counts.sum(axis=0)
    if np.any(seen == 0):
        s = int(np.flatnonzero(seen == 0)[0])
        raise ReconstructionError(f"system input {s} was never observed", cell=(s,))
    return StochMatrix(counts / seen[None, :])


def estimate_output(channel, joint, xi, cfg):
    """Output frequencies with ``xi`` applied before the machine; tends to ``process_output``."""
    machine = _Machine(channel, apply_preparation(xi, joint))
    counts = _observed_counts(machine, substream_seed(cfg.seed, machine.d_s ** 2 + 1), cfg.samples)
    return ProbVec(counts.sum(axis=1) / cfg.samples)
