"""
Typed exceptions raised across the lab.

DESIGN:
    Every domain failure derives from RegulusError; the CLI maps it to an exit code.
    Input-shaped failures also subclass ValueError.
"""


class RegulusError(Exception):
    """Base class for every failure the lab raises on purpose."""


class InfeasibleParametersError(RegulusError, ValueError):
    """Parameters admit no valid experiment (odd dn, p outside [0,1], threshold >= n, ...)."""


class HypothesisError(RegulusError, ValueError):
    """A bound was evaluated outside the hypotheses under which it holds."""


class IncompleteMatchingError(RegulusError, ValueError):
    """An operation that needs every stub paired received a partial matching."""


class HorizonError(RegulusError, ValueError):
    """A requested series horizon exceeds what the trace covers."""


class OracleSizeError(RegulusError, ValueError):
    """Exhaustive enumeration requested beyond the configured size cap."""


class UnknownAuditError(RegulusError, KeyError):
    """No event audit is registered under the given id."""
