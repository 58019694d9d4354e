class InputError(Exception):
    """Unreadable or invalid input file; maps to CLI exit code 1."""


class StageError(Exception):
    """A pipeline stage failed; maps to CLI exit code 2."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
