"""Exception and warning types shared across the package."""


class CQEDError(Exception):
    """Base class for all errors raised by cqedsim."""


class DimensionError(CQEDError, ValueError):
    """Invalid truncation size or mismatched subsystem dimensions."""


class DomainError(CQEDError, ValueError):
    """An argument lies outside the domain of a formula."""


class ContractError(CQEDError):
    """A numerical contract (Hermiticity, normalization, positivity) was violated."""


class StepSizeError(ContractError):
    """Integrator drift exceeded the hard limit; more substeps are needed."""


class ConfigError(CQEDError, ValueError):
    """Invalid experiment configuration.

    ``path`` carries the dotted key (e.g. ``dissipation.kappa_GHz``) when the
    problem can be pinned to a single field.
    """

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class TruncationWarning(UserWarning):
    """Population reached the top of a truncated Fock space."""


class RegimeWarning(UserWarning):
    """Parameters fall outside the regime where an approximation holds."""
