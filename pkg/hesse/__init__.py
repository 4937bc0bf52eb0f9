"""
Hesse Package
Real plane cubics in Hesse form: forms, traced curves, the positive index
cone, the Steinian involution, visibility and the scenario engines.
"""

from .exceptions import (
    CubicLabError, DegenerateParameter, DomainError, RankError, NotOnHessian, NotOnCurve,
    UnknownBranch, IdenticalPoints, NotOnBoundary, HypothesisFailed, NoConvergence, AtInfinity,
)
from .tolerances import Tolerances, TraceSettings, DEFAULT_TOLERANCES, DEFAULT_TRACE
from .error_handler import ErrorHandler, ErrorHandlingStrategy, CaptureErrorStrategy, RetryStrategy
from .agreement_validator import AgreementValidator

__all__ = [
    'CubicLabError',
    'DegenerateParameter',
    'DomainError',
    'RankError',
    'NotOnHessian',
    'NotOnCurve',
    'UnknownBranch',
    'IdenticalPoints',
    'NotOnBoundary',
    'HypothesisFailed',
    'NoConvergence',
    'AtInfinity',
    'Tolerances',
    'TraceSettings',
    'DEFAULT_TOLERANCES',
    'DEFAULT_TRACE',
    'ErrorHandler',
    'ErrorHandlingStrategy',
    'CaptureErrorStrategy',
    'RetryStrategy',
    'AgreementValidator'
]
