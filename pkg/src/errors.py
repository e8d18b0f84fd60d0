class MarketSimError(Exception):
    """Base class of every error raised by the simulator."""


class MarketSpecError(MarketSimError, ValueError):
    """Invalid or degenerate market specification, or market arguments out of
    bounds (negative investment, price at non-positive production, ...)."""


class QuantityFloorError(MarketSimError):
    """Total production of a period fell below the floor 1e-6 * Q_hat."""


class MonopolyDegenerateError(MarketSimError):
    """Opponents' production is below the best-response floor 1e-3 * Q_hat."""


class ConfigError(MarketSimError):
    """Unreadable or inconsistent configuration."""


class ParseFailure(MarketSimError):
    """An LLM reply could not be turned into a decision.

    Parameters
    ----------
    str_reason : str
        What went wrong.
    str_excerpt : str
        The offending part of the reply.
    """

    def __init__(self, str_reason, str_excerpt=""):
        self.str_reason = str_reason
        self.str_excerpt = str_excerpt
        super().__init__(f"{str_reason}: {str_excerpt!r}")


class TransportError(MarketSimError):
    """The chat endpoint could not be reached after the configured retries."""


class RunAborted(MarketSimError):
    """A run stopped early. The history up to the failing period is kept in
    `list_history` and has already been written to `str_log_path`."""

    def __init__(self, str_message, list_history, str_log_path, exc_cause=None):
        self.list_history = list_history
        self.str_log_path = str_log_path
        self.exc_cause = exc_cause
        super().__init__(str_message)


class SchemaVersionError(MarketSimError):
    """A run log was written with an unsupported schema version."""


class ShortSeriesError(MarketSimError, ValueError):
    """A series or history is shorter than the requested window."""
