"""Seeded random (channel, joint state, preparation) triples for the property suites."""
from dataclasses import dataclass

from probability.distributions import JointDist, StochMatrix
from probability.generators import make_rng, random_joint, random_stochastic

from .channels import JointChannel, random_channel


@dataclass(frozen=True)
class Instance:
    channel: JointChannel
    joint: JointDist
    preparation: StochMatrix

    @property
    def d_s(self):
        return self.channel.d_s

    @property
    def d_e(self):
        return self.channel.d_e


def random_instance(seed, d_s, d_e, *keys):
    """Flat-Dirichlet instance; the same ``(seed, keys)`` always gives the same triple."""
    rng = make_rng(seed, *keys)
    return instance_from_rng(rng, d_s, d_e)


def instance_from_rng(rng, d_s, d_e):
    channel = random_channel(rng, d_s, d_e)
    joint = random_joint(rng, d_s, d_e)
    return Instance(channel, joint, random_stochastic(rng, d_s))
