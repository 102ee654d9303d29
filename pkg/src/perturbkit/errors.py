"""Exception types shared across the toolkit."""


class PerturbkitError(Exception):
    """Base class for all toolkit errors."""


class SpanConflictError(PerturbkitError):
    """An edit list contains overlapping, unsorted, or out-of-range spans."""


class ConfigurationError(PerturbkitError):
    """Unknown operator, out-of-range parameter, or malformed config."""


class TransportError(PerturbkitError):
    """The remote service could not be reached (retries exhausted)."""


class ServiceError(PerturbkitError):
    """The remote service answered with a non-2xx status."""

    def __init__(self, status_code: int, body_excerpt: str):
        super().__init__(f"service returned {status_code}: {body_excerpt}")
        self.status_code = status_code
        self.body_excerpt = body_excerpt


class ProtocolError(PerturbkitError):
    """The remote service answered 2xx but violated the wire contract."""


class ReplayMissError(PerturbkitError):
    """A recorded/dictionary stub has no response for the request."""


class SingleClassError(PerturbkitError, ValueError):
    """A score set contains only one label where both are required."""
