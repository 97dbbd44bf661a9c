"""Exception types shared across the package."""

from __future__ import annotations


class CosigmaError(Exception):
    """Base class. ``code`` is the machine-readable name used by the CLI."""

    code = "Error"


class EmptyFileError(CosigmaError):
    code = "EmptyFile"


class MalformedRecordError(CosigmaError):
    code = "MalformedRecord"

    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnparseableRefError(CosigmaError):
    code = "UnparseableRef"


class EmptyCorpusError(CosigmaError):
    code = "EmptyCorpus"


class ConfigInvalidError(CosigmaError):
    code = "ConfigInvalid"
