"""Exception types shared across the toolkit."""


class EgoFilterError(Exception):
    """Base class for all toolkit errors."""


class InvalidInputError(EgoFilterError, ValueError):
    """An argument violates an operation's contract."""


class CalibrationError(EgoFilterError):
    """Response estimation found no excited frequency bins."""


class AlignmentError(EgoFilterError):
    """Cross-correlation could not confidently locate the reference."""


class HookError(EgoFilterError):
    """An external command hook failed; carries its captured output."""

    def __init__(self, message: str, stdout: str = "", stderr: str = ""):
        super().__init__(message)
        self.stdout = stdout
        self.stderr = stderr


class PostFilterError(HookError):
    """The post-filter hook exited with a nonzero status."""


class AsrError(HookError):
    """The ASR hook exited with a nonzero status."""


class EvaluationError(EgoFilterError):
    """Every item in an evaluation run failed."""
