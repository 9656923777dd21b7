"""Unsupervised soft bit error rate estimation.

Estimates the error rate of a binary link from receiver soft outputs alone:
a stochastic EM loop classifies the observations by transmitted bit value
and estimates the bit priors, Gaussian-kernel density estimation recovers
the class-conditional densities, and the error rate is the weighted tail
mass of those estimates.  A two-user CDMA simulator with an exact error
probability formula serves as the built-in validation harness.
"""

from .channel import (
    CdmaConfig,
    SoftOutputTrace,
    cross_correlation,
    default_codes,
    mc_ber,
    simulate,
    simulate_chip_level,
    snr_db_to_sigma,
    theoretical_bep,
)
from .errors import (
    DegenerateClassError,
    DegenerateDataError,
    DegenerateInitializationError,
    InvalidParameterError,
    SoftBerError,
    TraceFormatError,
    TraceParseError,
)
from .estimator import (
    ClassParams,
    EstimationReport,
    IterationRecord,
    q_function,
    soft_ber,
    supervised_estimate,
)
from .kde import (
    KdeModel,
    bandwidth_from_roughness,
    bandwidth_gaussian_rule,
    gaussian_kernel,
    kernel_roughness,
    refine_bandwidth,
    roughness_gaussian,
    roughness_numeric,
)
from .randomness import RandomStream, RoleStreams
from .sem import (
    AppMatrix,
    EmState,
    ObservationSet,
    e_step,
    initialize,
    m_step,
    run,
    run_with_state,
    stochastic_classify,
)

__version__ = "0.1.0"

__all__ = [
    "AppMatrix",
    "CdmaConfig",
    "ClassParams",
    "DegenerateClassError",
    "DegenerateDataError",
    "DegenerateInitializationError",
    "EmState",
    "EstimationReport",
    "InvalidParameterError",
    "IterationRecord",
    "KdeModel",
    "ObservationSet",
    "RandomStream",
    "RoleStreams",
    "SoftBerError",
    "SoftOutputTrace",
    "TraceFormatError",
    "TraceParseError",
    "bandwidth_from_roughness",
    "bandwidth_gaussian_rule",
    "cross_correlation",
    "default_codes",
    "e_step",
    "gaussian_kernel",
    "initialize",
    "kernel_roughness",
    "m_step",
    "mc_ber",
    "q_function",
    "refine_bandwidth",
    "roughness_gaussian",
    "roughness_numeric",
    "run",
    "run_with_state",
    "simulate",
    "simulate_chip_level",
    "snr_db_to_sigma",
    "soft_ber",
    "stochastic_classify",
    "supervised_estimate",
    "theoretical_bep",
]
