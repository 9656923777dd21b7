"""Unsupervised classification of soft outputs by stochastic EM.

The loop alternates three steps for a fixed number of iterations:

* estimation: per-observation posterior probabilities of the two bit values
  from the current priors and per-class kernel density estimates;
* maximization: new priors as the arithmetic means of those posteriors;
* stochastic classification: each observation joins the + class when its
  posterior exceeds a fresh uniform draw, so borderline samples keep
  migrating between classes instead of freezing at a hard threshold.

Class identity is anchored by the sign-based initialization and never
swapped; if the classes end up inverted (mean of the + class below the mean
of the - class) a warning is recorded in the report rather than silently
relabeling.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateClassError,
    DegenerateDataError,
    DegenerateInitializationError,
    InvalidParameterError,
)
from .estimator import ClassParams, EstimationReport, IterationRecord, soft_ber
from .kde import KdeModel

DEFAULT_ITERATIONS = 6
DEFAULT_BANDWIDTH_ROUNDS = 2
MIN_CLASS_SIZE = 2
CLASSIFY_MAX_ATTEMPTS = 10
ROW_SUM_TOL = 1e-12


@dataclass
class ObservationSet:
    """The scalar soft outputs feeding the estimator."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise InvalidParameterError("observations must form a 1-d array")
        if values.size < 4:
            raise InvalidParameterError(
                f"need at least 4 observations (2 per class), got {values.size}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidParameterError("observations must be finite")
        self.values = values

    @property
    def n(self):
        return int(self.values.size)


@dataclass
class AppMatrix:
    """Per-observation posterior probability pairs (rho_plus, rho_minus)."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[1] != 2:
            raise InvalidParameterError("app matrix must have shape (n, 2)")
        if np.any(rows < 0):
            raise InvalidParameterError("posterior probabilities must be non-negative")
        if np.any(np.abs(rows.sum(axis=1) - 1.0) > ROW_SUM_TOL):
            raise InvalidParameterError("each posterior pair must sum to 1")
        self.rows = rows

    @property
    def plus(self):
        return self.rows[:, 0]

    @property
    def minus(self):
        return self.rows[:, 1]

    @property
    def n(self):
        return int(self.rows.shape[0])


@dataclass
class EmState:
    """Parameters and density estimates after one iteration."""

    iteration: int
    plus: ClassParams
    minus: ClassParams
    kde_plus: KdeModel
    kde_minus: KdeModel

    def record(self):
        return IterationRecord(
            iteration=self.iteration,
            pi_plus=self.plus.prior,
            pi_minus=self.minus.prior,
            n_plus=self.plus.count,
            n_minus=self.minus.count,
            h_plus=self.plus.bandwidth,
            h_minus=self.minus.bandwidth,
        )


def _build_state(iteration, members_plus, members_minus, prior_plus, bandwidth_rounds):
    plus = ClassParams.from_members("+", members_plus, prior_plus, bandwidth_rounds)
    minus = ClassParams.from_members("-", members_minus, 1.0 - prior_plus, bandwidth_rounds)
    return EmState(
        iteration=iteration,
        plus=plus,
        minus=minus,
        kde_plus=KdeModel(plus.members, plus.bandwidth),
        kde_minus=KdeModel(minus.members, minus.bandwidth),
    )


def initialize(observations):
    """Sign-based split: non-negative values start in the + class.

    Priors are the class fractions and bandwidths come from the Gaussian
    rule of thumb.
    """
    values = observations.values
    mask_plus = values >= 0
    n_plus = int(mask_plus.sum())
    n_minus = observations.n - n_plus
    if n_plus < MIN_CLASS_SIZE or n_minus < MIN_CLASS_SIZE:
        raise DegenerateInitializationError(
            f"sign split needs >= {MIN_CLASS_SIZE} members per class, "
            f"got N+={n_plus}, N-={n_minus}"
        )
    return _build_state(
        iteration=1,
        members_plus=values[mask_plus],
        members_minus=values[~mask_plus],
        prior_plus=n_plus / observations.n,
        bandwidth_rounds=1,
    )


def e_step(state, observations):
    """Posterior probability of each bit value for every observation.

    Where both weighted densities underflow to zero the likelihood carries
    no information, so the row falls back to the current priors.
    """
    x = observations.values
    weighted_plus = state.plus.prior * state.kde_plus.evaluate(x)
    weighted_minus = state.minus.prior * state.kde_minus.evaluate(x)
    denom = weighted_plus + weighted_minus
    rows = np.empty((x.size, 2), dtype=float)
    ok = denom > 0
    rows[ok, 0] = weighted_plus[ok] / denom[ok]
    rows[ok, 1] = weighted_minus[ok] / denom[ok]
    rows[~ok, 0] = state.plus.prior
    rows[~ok, 1] = state.minus.prior
    return AppMatrix(rows)


def m_step(apps):
    """New priors: column means of the posterior matrix."""
    if apps.n == 0:
        raise InvalidParameterError("app matrix is empty")
    return float(apps.plus.mean()), float(apps.minus.mean())


def stochastic_classify(apps, observations, stream):
    """Random assignment: observation i joins the + class iff rho_i+ >= U_i.

    Redraws the whole assignment up to 10 times if either class ends up
    with fewer than 2 members, then falls back to the maximum-posterior
    assignment; a still-degenerate fallback raises.
    """
    values = observations.values
    for _ in range(CLASSIFY_MAX_ATTEMPTS):
        draws = stream.uniforms(apps.n)
        mask_plus = apps.plus >= draws
        n_plus = int(mask_plus.sum())
        if MIN_CLASS_SIZE <= n_plus <= apps.n - MIN_CLASS_SIZE:
            return values[mask_plus], values[~mask_plus]
    mask_plus = apps.plus >= apps.minus
    n_plus = int(mask_plus.sum())
    if MIN_CLASS_SIZE <= n_plus <= apps.n - MIN_CLASS_SIZE:
        return values[mask_plus], values[~mask_plus]
    raise DegenerateClassError(
        "classification keeps emptying a class; posteriors are degenerate "
        f"(maximum-posterior split gives N+={n_plus} of {apps.n})"
    )


def run_with_state(
    observations,
    stream,
    iterations=DEFAULT_ITERATIONS,
    bandwidth_rounds=DEFAULT_BANDWIDTH_ROUNDS,
    seed=None,
    config=None,
):
    """Full unsupervised estimation; returns (report, final EmState)."""
    if iterations < 1:
        raise InvalidParameterError(f"iterations must be >= 1, got {iterations}")
    state = initialize(observations)
    trace = [state.record()]
    for t in range(2, iterations + 1):
        try:
            apps = e_step(state, observations)
            pi_plus, _ = m_step(apps)
            members_plus, members_minus = stochastic_classify(apps, observations, stream)
            state = _build_state(t, members_plus, members_minus, pi_plus, bandwidth_rounds)
        except (DegenerateClassError, DegenerateDataError) as exc:
            raise type(exc)(f"iteration {t}: {exc}") from exc
        trace.append(state.record())
    warnings = []
    if state.plus.members.mean() < state.minus.members.mean():
        warnings.append(
            "class-anchoring: final + class mean lies below the - class mean; "
            "labels were kept as initialized"
        )
    report = EstimationReport(
        ber=soft_ber(state.plus, state.minus),
        pi_plus=state.plus.prior,
        pi_minus=state.minus.prior,
        trace=trace,
        seed=seed,
        config=dict(config) if config else {},
        warnings=warnings,
    )
    return report, state


def run(
    observations,
    stream,
    iterations=DEFAULT_ITERATIONS,
    bandwidth_rounds=DEFAULT_BANDWIDTH_ROUNDS,
    seed=None,
    config=None,
):
    """Full unsupervised estimation over a fixed number of iterations.

    Returns a report carrying the estimate, the final priors, and one trace
    row per iteration.
    """
    report, _ = run_with_state(
        observations, stream, iterations, bandwidth_rounds, seed, config
    )
    return report
