"""Exception types shared across the package."""


class ConfigurationError(Exception):
    """A run configuration is inconsistent with the oracle or landscape."""


class ResourceLimitError(Exception):
    """Requested computation exceeds a configured resource limit."""


class CertificateAnomalyError(Exception):
    """Elimination data contradicts the Lipschitz/noise preconditions.

    Raised when the queried estimates cannot all be within their confidence
    radii of any L-Lipschitz function (or when a round keeps no center,
    which cannot happen under a round-common confidence radius). Signals
    that L is too small or the noise model is misconfigured.
    """

    def __init__(self, message: str, flat_id: int = 0, round_index: int = 0):
        super().__init__(message)
        self.flat_id = flat_id
        self.round_index = round_index
