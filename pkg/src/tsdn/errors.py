"""Exception taxonomy shared by all modules.

The CLI maps these onto its stable exit codes: I/O problems -> 2,
missing prerequisite artifacts -> 3, training divergence -> 4.
"""


class TsdnError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(TsdnError, ValueError):
    """An argument violates an operation's precondition (bad values)."""


class ShapeError(InvalidInputError):
    """Array/tensor shapes are inconsistent with the contract."""


class ConfigError(TsdnError, ValueError):
    """A configuration value or combination is invalid."""


class ManifestError(TsdnError):
    """A dataset manifest is missing, malformed, or points at missing files."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class MissingArtifactError(TsdnError):
    """A required run artifact (checkpoint, subset, manifest) does not exist."""


class CheckpointError(TsdnError):
    """A checkpoint directory is corrupt or has an unsupported version."""


class DivergenceError(TsdnError):
    """Training produced a non-finite loss; aborted with diagnostics."""
