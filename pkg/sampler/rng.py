"""
SplitMix64 streams.

Output ``k`` (counting from zero) of the stream seeded with ``seed`` is
``mix(seed + (k + 1) * GOLDEN)`` modulo 2**64, so any block of a stream can be
generated directly with numpy; ``SplitMix64`` walks the same sequence one
value at a time.
"""
import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
MIX_A = 0xBF58476D1CE4E5B9
MIX_B = 0x94D049BB133111EB
MASK = (1 << 64) - 1
SEED_MAX = MASK

_DOUBLE_SCALE = 2.0 ** -53


def mix(z):
    z = ((z ^ (z >> 30)) * MIX_A) & MASK
    z = ((z ^ (z >> 27)) * MIX_B) & MASK
    return z ^ (z >> 31)


def to_unit(x):
    """Top 53 bits as a double in ``[0, 1)``."""
    return (x >> 11) * _DOUBLE_SCALE


class SplitMix64:
    def __init__(self, seed):
        self.state = int(seed) & MASK

    def next_u64(self):
        self.state = (self.state + GOLDEN) & MASK
        return mix(self.state)

    def next_double(self):
        return to_unit(self.next_u64())


def block(seed, start, count):
    """Outputs ``start .. start + count - 1`` of the stream as a uint64 array."""
    k = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    # uint64 array arithmetic wraps modulo 2**64
    z = np.uint64(int(seed) & MASK) + k * np.uint64(GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX_A)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX_B)
    return z ^ (z >> np.uint64(31))


def unit_block(seed, start, count):
    return (block(seed, start, count) >> np.uint64(11)).astype(np.float64) * _DOUBLE_SCALE


def substream_seed(seed, index):
    """Seed of the ``index``-th derived stream: output ``index`` of the master stream."""
    return mix((int(seed) + (index + 1) * GOLDEN) & MASK)
