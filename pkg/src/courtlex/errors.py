"""Exception types shared across the toolkit."""


class CourtlexError(Exception):
    """Base class for user-facing errors (bad arguments, bad files)."""


class FormatError(CourtlexError, ValueError):
    """A file does not match its documented format.

    ``where`` names the offending field path or line number.
    """

    def __init__(self, message, where=None, path=None):
        self.where = where
        self.path = path
        parts = []
        if path is not None:
            parts.append(str(path))
        if where is not None:
            parts.append(str(where))
        prefix = ": ".join(parts)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class UndefinedScoreError(CourtlexError, KeyError):
    """A collocation score was requested for an unseen unigram."""

    def __str__(self):
        return str(self.args[0]) if self.args else "undefined score"


class UndefinedWerError(CourtlexError, ValueError):
    """WER requested for an empty reference."""


class ConfigError(CourtlexError, ValueError):
    """One or more configuration fields are invalid.

    All violations are collected in ``violations`` as (field, message) pairs.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = [f"{field}: {msg}" for field, msg in self.violations]
        super().__init__("invalid configuration:\n  " + "\n  ".join(lines))
