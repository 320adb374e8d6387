"""Exception types raised across the package."""


class CapacityError(MemoryError):
    """Requested sector is larger than the configured amplitude cap."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class ZeroProbabilityError(ValueError):
    """A forced measurement outcome has (numerically) zero Born weight."""


class ModelInconsistencyError(RuntimeError):
    """A readout step that should be deterministic is not."""


class NoCrossingError(ValueError):
    """Two curves never change order on the sampled grid."""


class ConfigError(ValueError):
    """Invalid experiment configuration.

    ``key`` holds the dotted path of the offending field when known.
    """

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class TraceDriftError(RuntimeError):
    """Density-matrix trace left its tolerance band."""
