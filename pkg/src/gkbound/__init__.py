"""Upper-bound estimates for Grothendieck constants via power-series reversion
of CCP functions, with exact Bell-polynomial inversion, Walsh-Hadamard matrices
and Monte-Carlo oracles."""

from .ccp import BoundReport, CcpDescriptor, bound, catalog
from .errors import DomainError, GkBoundError, SizeGuard
from .series import TruncatedSeries

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "CcpDescriptor",
    "DomainError",
    "GkBoundError",
    "SizeGuard",
    "TruncatedSeries",
    "bound",
    "catalog",
]
