"""Soft bit error rate computation from classified soft outputs.

Given a partition of the observations into a +1 class and a -1 class with
priors and per-class kernel bandwidths, the error rate estimate is the
probability mass each class's kernel estimate places on the wrong side of
the decision threshold at zero:

    ber = (pi+ / N+) * sum Q(X_i / h+)   over the + class
        + (pi- / N-) * sum Q(-X_i / h-)  over the - class

with Q the Gaussian tail function.  Each Q term is the exact integral of one
kernel bump over the error region, so the sum equals the integral of the
weighted kernel density estimates without any quadrature.
"""

import math
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.special import erfc

from .errors import DegenerateClassError, InvalidParameterError
from .kde import population_std, refine_bandwidth
from .randomness import GENERATOR_NAME

PRIOR_SUM_TOL = 1e-12

REPORT_FORMAT_VERSION = 1


def q_function(x):
    """Gaussian tail probability P[N(0,1) > x]; accepts arrays."""
    result = 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    if np.ndim(x) == 0:
        return float(result)
    return result


@dataclass
class ClassParams:
    """Per-class state: members, prior, spread, and kernel bandwidth."""

    label: str  # "+" or "-"
    members: np.ndarray
    prior: float
    std_dev: float
    bandwidth: float

    def __post_init__(self):
        self.members = np.asarray(self.members, dtype=float)
        if self.label not in ("+", "-"):
            raise InvalidParameterError(f"label must be '+' or '-', got {self.label!r}")
        if not 0.0 <= self.prior <= 1.0:
            raise InvalidParameterError(f"prior must lie in [0, 1], got {self.prior}")

    @property
    def count(self):
        return int(self.members.size)

    @classmethod
    def from_members(cls, label, members, prior, bandwidth_rounds=2):
        """Build params for one class, selecting its bandwidth from the data."""
        members = np.asarray(members, dtype=float)
        return cls(
            label=label,
            members=members,
            prior=float(prior),
            std_dev=population_std(members),
            bandwidth=refine_bandwidth(members, rounds=bandwidth_rounds),
        )


@dataclass
class IterationRecord:
    """One row of the per-iteration diagnostics trace."""

    iteration: int
    pi_plus: float
    pi_minus: float
    n_plus: int
    n_minus: int
    h_plus: float
    h_minus: float


@dataclass
class EstimationReport:
    """Final estimate plus the provenance needed to reproduce it."""

    ber: float
    pi_plus: float
    pi_minus: float
    trace: list
    seed: int | None = None
    config: dict = field(default_factory=dict)
    generator: str = GENERATOR_NAME
    warnings: list = field(default_factory=list)

    def to_json_dict(self):
        return {
            "format_version": REPORT_FORMAT_VERSION,
            "ber": self.ber,
            "pi_plus": self.pi_plus,
            "pi_minus": self.pi_minus,
            "trace": [asdict(rec) for rec in self.trace],
            "seed": self.seed,
            "generator": self.generator,
            "warnings": list(self.warnings),
            "config": dict(self.config),
        }


def _validate_classes(plus, minus):
    if plus.count == 0 or minus.count == 0:
        raise DegenerateClassError(
            f"both classes must be non-empty (N+={plus.count}, N-={minus.count})"
        )
    if plus.bandwidth <= 0 or minus.bandwidth <= 0:
        raise InvalidParameterError("bandwidths must be > 0")
    if abs(plus.prior + minus.prior - 1.0) > PRIOR_SUM_TOL:
        raise InvalidParameterError(
            f"priors must sum to 1, got {plus.prior} + {minus.prior}"
        )


def soft_ber(plus, minus):
    """Soft error-rate estimate from the two classified sample sets.

    Never clamped: a valid input always yields a value in [0, 1] up to
    floating-point rounding.
    """
    _validate_classes(plus, minus)
    term_plus = (plus.prior / plus.count) * np.sum(q_function(plus.members / plus.bandwidth))
    term_minus = (minus.prior / minus.count) * np.sum(
        q_function(-minus.members / minus.bandwidth)
    )
    return float(term_plus + term_minus)


def supervised_estimate(values, true_bits, bandwidth_rounds=2, seed=None, config=None):
    """Estimate with known transmitted bits: classify by the true labels,
    take priors from the label frequencies, and apply the soft estimate.
    """
    values = np.asarray(values, dtype=float)
    true_bits = np.asarray(true_bits)
    if values.shape != true_bits.shape:
        raise InvalidParameterError("values and true_bits must have equal length")
    mask_plus = true_bits > 0
    n_plus = int(mask_plus.sum())
    n_minus = int(values.size - n_plus)
    if n_plus == 0 or n_minus == 0:
        raise DegenerateClassError("both bit values must be present among the labels")
    plus = ClassParams.from_members(
        "+", values[mask_plus], n_plus / values.size, bandwidth_rounds
    )
    minus = ClassParams.from_members(
        "-", values[~mask_plus], n_minus / values.size, bandwidth_rounds
    )
    record = IterationRecord(
        iteration=1,
        pi_plus=plus.prior,
        pi_minus=minus.prior,
        n_plus=plus.count,
        n_minus=minus.count,
        h_plus=plus.bandwidth,
        h_minus=minus.bandwidth,
    )
    return EstimationReport(
        ber=soft_ber(plus, minus),
        pi_plus=plus.prior,
        pi_minus=minus.prior,
        trace=[record],
        seed=seed,
        config=dict(config) if config else {},
    )
