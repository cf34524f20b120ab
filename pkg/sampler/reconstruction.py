from dataclasses import dataclass

import numpy as np

from dynamics.process import ProcessMap
from probability.distributions import ProbVec

from .exceptions import ReconstructionError


@dataclass(frozen=True, eq=False)
class EmpiricalProcess:
    """
    Raw tallies of a tomography experiment.

    ``counts[j, k]`` is the output histogram of the accepted runs of basis
    preparation ``E_jk`` and ``accepted[j, k]`` their number, out of
    ``samples`` attempts per preparation.
    """

    counts: np.ndarray
    accepted: np.ndarray
    samples: int
    seed: int

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        accepted = np.array(self.accepted, dtype=np.int64)
        d = accepted.shape[0]
        if accepted.shape != (d, d) or counts.shape != (d, d, d):
            raise ValueError(f"counts {counts.shape} and accepted {accepted.shape} do not describe a tomography run")
        if np.any(counts.sum(axis=2) != accepted) or np.any(accepted > self.samples):
            raise ValueError('histograms do not add up to the acceptance counts')
        counts.setflags(write=False)
        accepted.setflags(write=False)
        object.__setattr__(self, 'counts', counts)
        object.__setattr__(self, 'accepted', accepted)

    @property
    def dim(self):
        return self.accepted.shape[0]

    def histogram(self, j, k):
        return self.counts[j, k]

    def acceptance_rate(self, j, k):
        return self.accepted[j, k] / self.samples


def reconstruct_theta(empirical):
    """
    Estimate the process from counts: the basis output of ``E_jk`` is its
    histogram divided by the number of attempts, and ``p_k`` is the
    acceptance rate averaged over the ``d`` cells that post-select on ``k``.
    """
    empty = np.argwhere(empirical.accepted == 0)
    if len(empty):
        j, k = (int(x) for x in empty[0])
        raise ReconstructionError(
            f"basis preparation ({j}, {k}) accepted no runs out of {empirical.samples}",
            cell=(j, k),
        )
    n = empirical.samples
    outputs = empirical.counts / n
    rates = (empirical.accepted / n).mean(axis=0)
    # independent cells: the averaged rates only sum to one in expectation
    return ProcessMap(outputs, ProbVec(rates / rates.sum()), estimated=True)


def cells_within_error_bars(empirical, process, sigmas=5.0):
    """
    Fraction of basis preparations whose normalised histogram lies within
    ``sigmas`` binomial standard deviations of the exact output, entry by entry.
    """
    d = empirical.dim
    good = 0
    for j in range(d):
        for k in range(d):
            acc = empirical.accepted[j, k]
            exact = process.conditional_output(j, k)
            if acc == 0 or exact is None:
                good += int(acc == 0 and exact is None)
                continue
            q = exact.entries
            q_hat = empirical.histogram(j, k) / acc
            bound = sigmas * np.sqrt(q * (1 - q) / acc) + 1e-12
            good += int(np.all(np.abs(q_hat - q) <= bound))
    return good / (d * d)
