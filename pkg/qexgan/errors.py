"""Exception hierarchy for qexgan.

Validation failures map to exit code 2, everything else to exit code 1.
"""


class QexganError(Exception):
    """Base class for all qexgan errors."""

    exit_code = 1


class ValidationFailure(QexganError):
    """Raised when inputs, artifacts or configuration fail validation."""

    exit_code = 2


class MissingInputError(ValidationFailure):
    """Raised when a referenced input file does not exist."""

    def __init__(self, path: object, what: str = "file") -> None:
        super().__init__(f"{what} not found: {path}")
        self.path = path


class MalformedRecordError(ValidationFailure):
    """Raised when a line of an input file cannot be parsed."""

    def __init__(self, path: object, line_number: int, reason: str) -> None:
        super().__init__(f"{path}:{line_number}: {reason}")
        self.path = path
        self.line_number = line_number


class EmptyInputError(ValidationFailure):
    """Raised when an operation receives no usable input."""

    pass


class ConfigError(ValidationFailure):
    """Raised when a configuration violates its invariants."""

    pass


class MissingArtifactError(ValidationFailure):
    """Raised when a command needs an artifact an earlier command writes."""

    def __init__(self, name: str, path: object) -> None:
        super().__init__(f"missing artifact '{name}' at {path}")
        self.name = name


class ArtifactMismatch(ValidationFailure):
    """Raised when a recorded upstream hash differs from the current artifact."""

    def __init__(self, name: str, expected: str, actual: str) -> None:
        super().__init__(
            f"artifact '{name}' changed: recorded hash {expected}, "
            f"current hash {actual}"
        )
        self.name = name
        self.expected = expected
        self.actual = actual


class MissingConditionArtifact(ValidationFailure):
    """Raised when a condition strategy lacks the context artifact it needs."""

    pass


class ConditionCoverageError(ValidationFailure):
    """Raised when a query has no condition and none can be computed."""

    pass


class ComputationError(QexganError):
    """Raised when a numerical routine cannot produce a result."""

    pass


class DegenerateCovarianceError(ComputationError):
    """Raised when PCA is asked for more components than the data rank."""

    def __init__(self, rank: int, target_dim: int) -> None:
        super().__init__(
            f"covariance rank {rank} is below the requested dimension {target_dim}"
        )
        self.rank = rank
        self.target_dim = target_dim


class WorkdirLockedError(QexganError):
    """Raised when another command holds the workdir lock."""

    def __init__(self, path: object) -> None:
        super().__init__(
            f"workdir is locked by another command (remove {path} if it is stale)"
        )
        self.path = path
