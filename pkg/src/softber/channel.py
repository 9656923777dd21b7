"""Two-user synchronous CDMA/BPSK link over AWGN with matched-filter detection.

Ground truth for validating the estimator: the desired user's decision
statistic is

    X_i = A1*b1_i + A2*b2_i*rho + n_i,    n_i ~ N(0, sigma^2)

with rho the normalized cross-correlation of the two spreading codes, and
the exact bit error probability is

    p_e = 2*pi+*pi- * Q((A1 - A2*rho)/sigma) + (pi+^2 + pi-^2) * Q((A1 + A2*rho)/sigma).

The matched-filter output is a sufficient statistic, so the simulator draws
the scalar statistic directly (one Gaussian per symbol); a chip-level path
exists for cross-checking only.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError
from .estimator import q_function

DEFAULT_SPREADING_FACTOR = 7


def default_codes():
    """The two length-7 unit-norm spreading codes used throughout."""
    scale = 1.0 / math.sqrt(7.0)
    s1 = scale * np.array([+1, +1, +1, +1, -1, -1, -1], dtype=float)
    s2 = scale * np.array([-1, -1, +1, +1, -1, -1, -1], dtype=float)
    return s1, s2


def cross_correlation(a, b):
    """Normalized cross-correlation (inner product) of two codes."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise InvalidParameterError(
            f"codes must have equal length, got {a.size} and {b.size}"
        )
    return float(a @ b)


def snr_db_to_sigma(snr_db):
    """Noise standard deviation for a per-user matched-filter SNR = 1/(2*sigma^2)."""
    if not math.isfinite(snr_db):
        raise InvalidParameterError(f"snr_db must be finite, got {snr_db}")
    return 1.0 / math.sqrt(2.0 * 10.0 ** (snr_db / 10.0))


@dataclass
class CdmaConfig:
    """Simulation parameters for the two-user link."""

    snr_db: float = 0.0
    pi_plus: float = 0.5
    n_bits: int = 10_000
    amplitude_1: float = 1.0
    amplitude_2: float = 1.0
    code_1: np.ndarray = field(default_factory=lambda: default_codes()[0])
    code_2: np.ndarray = field(default_factory=lambda: default_codes()[1])
    noise_std: float | None = None  # overrides snr_db when set (allows sigma = 0)

    def __post_init__(self):
        self.code_1 = np.asarray(self.code_1, dtype=float)
        self.code_2 = np.asarray(self.code_2, dtype=float)
        if self.code_1.shape != self.code_2.shape or self.code_1.ndim != 1:
            raise InvalidParameterError("spreading codes must be 1-d and equal length")
        for name, code in (("code_1", self.code_1), ("code_2", self.code_2)):
            if abs(code @ code - 1.0) > 1e-12:
                raise InvalidParameterError(f"{name} must have unit norm")
        if not 0.0 <= self.pi_plus <= 1.0:
            raise InvalidParameterError(f"pi_plus must lie in [0, 1], got {self.pi_plus}")
        if self.n_bits < 1:
            raise InvalidParameterError(f"n_bits must be >= 1, got {self.n_bits}")
        if self.noise_std is not None and self.noise_std < 0:
            raise InvalidParameterError(f"noise_std must be >= 0, got {self.noise_std}")

    @property
    def spreading_factor(self):
        return int(self.code_1.size)

    @property
    def rho(self):
        return cross_correlation(self.code_1, self.code_2)

    @property
    def sigma(self):
        if self.noise_std is not None:
            return float(self.noise_std)
        return snr_db_to_sigma(self.snr_db)

    def echo(self):
        """Plain-dict form for report provenance."""
        return {
            "snr_db": self.snr_db,
            "pi_plus": self.pi_plus,
            "n_bits": self.n_bits,
            "amplitude_1": self.amplitude_1,
            "amplitude_2": self.amplitude_2,
            "spreading_factor": self.spreading_factor,
            "rho": self.rho,
            "noise_std": self.noise_std,
        }


@dataclass
class SoftOutputTrace:
    """Simulated decision statistics plus the true bits they decide."""

    statistics: np.ndarray
    true_bits: np.ndarray

    def __post_init__(self):
        self.statistics = np.asarray(self.statistics, dtype=float)
        self.true_bits = np.asarray(self.true_bits, dtype=np.int64)
        if self.statistics.shape != self.true_bits.shape:
            raise InvalidParameterError("statistics and true_bits must have equal length")
        if not np.all(np.isfinite(self.statistics)):
            raise InvalidParameterError("statistics must be finite")

    @property
    def n(self):
        return int(self.statistics.size)


def _matched_filter_outputs(config, bits_1, bits_2, noise):
    rho = config.rho
    return (
        config.amplitude_1 * bits_1
        + (config.amplitude_2 * rho) * bits_2
        + noise
    )


def simulate(config, streams):
    """Draw a soft-output trace for the desired user.

    Consumes, in order: the user-1 bit stream, the user-2 bit stream, then
    one Gaussian per symbol from the noise stream.
    """
    bits_1 = streams.bits_user1.bernoulli_bits(config.n_bits, config.pi_plus)
    bits_2 = streams.bits_user2.bernoulli_bits(config.n_bits, config.pi_plus)
    noise = streams.noise.gaussians(config.n_bits, 0.0, config.sigma)
    statistics = _matched_filter_outputs(config, bits_1, bits_2, noise)
    return SoftOutputTrace(statistics=statistics, true_bits=bits_1)


def simulate_chip_level(config, streams):
    """Cross-check path: full chip vectors projected onto the desired code.

    Consumes ``spreading_factor`` Gaussians per symbol.  Returns the trace
    and the per-symbol projected noise so tests can feed the same draws to
    the scalar path.
    """
    l_sf = config.spreading_factor
    bits_1 = streams.bits_user1.bernoulli_bits(config.n_bits, config.pi_plus)
    bits_2 = streams.bits_user2.bernoulli_bits(config.n_bits, config.pi_plus)
    chips = streams.noise.gaussians(config.n_bits * l_sf, 0.0, config.sigma)
    chips = chips.reshape(config.n_bits, l_sf)
    received = (
        config.amplitude_1 * bits_1[:, None] * config.code_1[None, :]
        + config.amplitude_2 * bits_2[:, None] * config.code_2[None, :]
        + chips
    )
    statistics = received @ config.code_1
    projected_noise = chips @ config.code_1
    return SoftOutputTrace(statistics=statistics, true_bits=bits_1), projected_noise


def theoretical_bep(config):
    """Exact bit error probability of the matched-filter receiver."""
    sigma = config.sigma
    if sigma <= 0:
        raise InvalidParameterError("theoretical BEP requires sigma > 0")
    rho = config.rho
    pi_plus = config.pi_plus
    pi_minus = 1.0 - pi_plus
    near = q_function((config.amplitude_1 - config.amplitude_2 * rho) / sigma)
    far = q_function((config.amplitude_1 + config.amplitude_2 * rho) / sigma)
    return float(2.0 * pi_plus * pi_minus * near + (pi_plus**2 + pi_minus**2) * far)


def mc_ber(trace):
    """Hard-decision error rate against the true bits; sign(0) counts as +1."""
    if trace.n == 0:
        raise InvalidParameterError("trace is empty")
    decisions = np.where(trace.statistics >= 0, 1, -1)
    return float(np.count_nonzero(decisions != trace.true_bits) / trace.n)
