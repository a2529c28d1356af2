"""Exception hierarchy shared across the package.

Everything raised on purpose derives from SynthGridError so callers (and
the fuzz tests) can catch one type. Parse-side failures additionally derive
from ParseFailure, which keeps "the text was bad" distinct from "the run
was misconfigured" or "the network broke".
"""

from __future__ import annotations


class SynthGridError(Exception):
    """Base class for all package errors."""


class ConfigError(SynthGridError):
    """Invalid or unloadable run configuration."""


class TransportError(SynthGridError):
    """Retryable transport failure (timeouts, 429, 5xx, refused sockets)."""


class ApiError(SynthGridError):
    """Terminal API failure (non-retryable HTTP status)."""

    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


class FixtureMissing(SynthGridError):
    """Replay mode found no recorded fixture for the request digest."""

    def __init__(self, digest: str):
        super().__init__(f"no fixture recorded for request digest {digest}")
        self.digest = digest


class FixtureConflict(SynthGridError):
    """Re-recording produced different content for an existing digest."""


class MissingPlaceholder(SynthGridError):
    """A template placeholder has no binding."""

    def __init__(self, name: str):
        super().__init__(f"no binding provided for placeholder ${name}$")
        self.name = name


class HistoryError(SynthGridError):
    """A chained conversation was assembled out of order or cross-country."""


class ParseFailure(SynthGridError):
    """Base class for all response-text parsing errors."""


class EnvelopeError(ParseFailure):
    """Response delimiters missing, inverted, or enclosing nothing."""

    def __init__(self, kind: str, detail: str = ""):
        super().__init__(f"{kind}: {detail}" if detail else kind)
        self.kind = kind


class ParseError(ParseFailure):
    """Malformed grammar inside an otherwise well-delimited response."""


class ContentError(ParseFailure):
    """Well-formed response whose content breaks a semantic requirement."""


class RangeError(ParseFailure):
    """A seasonal min exceeded its max."""

    def __init__(self, parameter: str, season: str):
        super().__init__(f"{parameter} range for {season} has min > max")
        self.parameter = parameter
        self.season = season


class ShapeError(ParseFailure):
    """A series had the wrong element count or a duplicated index."""

    def __init__(self, message: str, parameter: str | None = None, count: int | None = None):
        super().__init__(message)
        self.parameter = parameter
        self.count = count


class MemberMismatch(ParseFailure):
    """Consumption sections do not line up with the family member list."""

    def __init__(self, missing: tuple[str, ...], extra: tuple[str, ...]):
        super().__init__(f"member sections mismatch: missing={list(missing)} extra={list(extra)}")
        self.missing = missing
        self.extra = extra


class NegativeConsumptionError(ParseFailure):
    """A parsed kWh value was negative."""


class CoordError(SynthGridError):
    """Latitude/longitude outside the valid range."""


class AssemblyError(SynthGridError):
    """Yearly assembly is missing inputs or was given inconsistent ones."""


class ComparisonError(SynthGridError):
    """Two signatures cannot be compared (incompatible binning)."""


class StageFailure(SynthGridError):
    """A pipeline stage item failed after exhausting its retries."""
