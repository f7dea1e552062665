"""Numerical verification of q-hypergeometric sum-integral identities.

The package evaluates q-Pochhammer products, the D-function and the M
sum-integral operator, and checks the q-beta sum-integral and the
star-triangle relation on seeded, pole-safe parameter samples.
"""

from qbailey.errors import (
    ConvergenceError,
    DomainError,
    PoleProximityError,
    QBaileyError,
    SamplingExhausted,
)
from qbailey.qkernel import (
    QModulus,
    SpectralPoint,
    TruncationPolicy,
    qpoch,
    qpoch_multi,
    qpow_half,
    qratio,
    verify_reflection,
)
from qbailey.report import Report

__all__ = [
    "ConvergenceError",
    "DomainError",
    "PoleProximityError",
    "QBaileyError",
    "SamplingExhausted",
    "QModulus",
    "SpectralPoint",
    "TruncationPolicy",
    "qpoch",
    "qpoch_multi",
    "qpow_half",
    "qratio",
    "verify_reflection",
    "Report",
]

__version__ = "0.1.0"
