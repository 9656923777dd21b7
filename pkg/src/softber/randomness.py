"""Deterministic, seedable random streams.

Every stochastic piece of the pipeline (channel noise, bit sources, the
random classification rule) draws from its own :class:`RandomStream`.  A
stream is a PCG64 generator producing 53-bit uniforms in [0, 1); Gaussian
variates are derived from the uniform stream with the Box-Muller transform
(cosine branch only, one normal per pair of uniforms) so that another
implementation fed the same uniforms reproduces the exact same sequence.

Child streams are derived from a top-level seed by XOR-ing fixed role
constants, which keeps the simulated observations independent of how many
draws the estimation loop consumes.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError

_MASK64 = (1 << 64) - 1

GENERATOR_NAME = "pcg64-boxmuller"

# Role constants XOR-ed with the top-level seed to derive child streams.
# Values are the splitmix64 increment/mixing constants; any fixed, distinct
# 64-bit values would do, these are merely recognizable.
ROLE_NOISE = 0x9E3779B97F4A7C15
ROLE_BITS_USER1 = 0xBF58476D1CE4E5B9
ROLE_BITS_USER2 = 0x94D049BB133111EB
ROLE_EM_CLASSIFY = 0xD6E8FEB86659FD93


def splitmix64(value):
    """One splitmix64 step; used to derive well-spread per-index seeds."""
    value = (value + 0x9E3779B97F4A7C15) & _MASK64
    z = value
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_point_seed(seed, index):
    """Seed for the ``index``-th point of a sweep run under ``seed``."""
    return splitmix64(seed ^ ((index + 1) & _MASK64))


class RandomStream:
    """Single-owner random source with a 64-bit seed.

    Scalar and vector draws are interchangeable: ``n`` scalar calls produce
    exactly the same values as one vector call of size ``n``.
    """

    def __init__(self, seed):
        seed = int(seed)
        if not 0 <= seed <= _MASK64:
            raise InvalidParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self._rng = np.random.Generator(np.random.PCG64(seed))

    def child(self, role_constant):
        """Fresh stream seeded with ``seed XOR role_constant``."""
        return RandomStream(self.seed ^ (role_constant & _MASK64))

    def uniforms(self, n):
        """Array of ``n`` uniforms in [0, 1)."""
        return self._rng.random(int(n))

    def next_uniform(self):
        """Next uniform in [0, 1)."""
        return float(self._rng.random())

    def gaussians(self, n, mean=0.0, std_dev=1.0):
        """Array of ``n`` independent N(mean, std_dev**2) variates.

        Each variate consumes two uniforms u1, u2 and is
        ``sqrt(-2*ln(1-u1)) * cos(2*pi*u2)`` scaled and shifted.
        """
        if std_dev < 0:
            raise InvalidParameterError(f"std_dev must be >= 0, got {std_dev}")
        u = self.uniforms(2 * int(n))
        u1 = u[0::2]
        u2 = u[1::2]
        # log1p(-u1) = ln(1 - u1) is exact for u1 in [0, 1); never hits log(0).
        radius = np.sqrt(-2.0 * np.log1p(-u1))
        z = radius * np.cos(2.0 * np.pi * u2)
        return mean + std_dev * z

    def next_gaussian(self, mean=0.0, std_dev=1.0):
        """Next N(mean, std_dev**2) variate."""
        return float(self.gaussians(1, mean, std_dev)[0])

    def bernoulli_bits(self, n, p_plus):
        """Array of ``n`` bits in {+1, -1}, +1 with probability ``p_plus``."""
        if not 0.0 <= p_plus <= 1.0:
            raise InvalidParameterError(f"p_plus must lie in [0, 1], got {p_plus}")
        u = self.uniforms(n)
        return np.where(u < p_plus, 1, -1).astype(np.int64)

    def bernoulli_bit(self, p_plus):
        """Next bit in {+1, -1}, +1 with probability ``p_plus``."""
        return int(self.bernoulli_bits(1, p_plus)[0])


@dataclass
class RoleStreams:
    """The four independent child streams used by the full pipeline."""

    noise: RandomStream
    bits_user1: RandomStream
    bits_user2: RandomStream
    em_classify: RandomStream

    @classmethod
    def from_seed(cls, seed):
        root = RandomStream(seed)
        return cls(
            noise=root.child(ROLE_NOISE),
            bits_user1=root.child(ROLE_BITS_USER1),
            bits_user2=root.child(ROLE_BITS_USER2),
            em_classify=root.child(ROLE_EM_CLASSIFY),
        )
