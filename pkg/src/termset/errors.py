"""Exception hierarchy. Each error carries the CLI exit code it maps to:
0 success, 2 validation, 3 missing/OOV seed, 4 backend transport, 5 internal.
"""


class TermsetError(Exception):
    exit_code = 5


class ValidationError(TermsetError):
    """Bad configuration or bad input values."""

    exit_code = 2


class ConfigError(ValidationError):
    """Run configuration failed validation; message lists every violation."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class IngestionError(ValidationError):
    """Corpus source could not be read."""

    def __init__(self, line_no, reason):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {reason}")


class EmptyCorpusError(ValidationError):
    pass


class InvalidOccurrenceError(ValidationError):
    pass


class InvalidWorldError(ValidationError):
    pass


class CorruptTableError(ValidationError):
    """Embedding table file is malformed (e.g. inconsistent dimensions)."""


class UndefinedMetricError(ValidationError):
    """Metric has no defined value (e.g. empty gold set)."""


class MissingSeedError(TermsetError):
    """A seed term has no corpus occurrence or no embedding."""

    exit_code = 3

    def __init__(self, term, where="corpus"):
        self.term = term
        super().__init__(f"seed term {term!r} not found in {where}")


class SeedOovError(TermsetError):
    """A seed term is not a vocabulary item of the LM backend (fatal)."""

    exit_code = 3

    def __init__(self, terms):
        self.terms = tuple(terms)
        super().__init__(
            "seed term(s) out of LM vocabulary: " + ", ".join(repr(t) for t in self.terms)
        )


class TransportError(TermsetError):
    """Backend unreachable or persistently overloaded (retryable exhausted)."""

    exit_code = 4


class BackendRequestError(TermsetError):
    """Backend rejected a request (HTTP 400 family)."""

    exit_code = 4

    def __init__(self, code, detail=""):
        self.code = code
        self.detail = detail
        super().__init__(f"{code}: {detail}")


class PatternTooLongError(BackendRequestError):
    """Pattern exceeds the backend context limit."""

    def __init__(self, limit, length=None):
        self.limit = limit
        self.length = length
        detail = f"pattern length {length} exceeds context limit {limit}" if length else str(limit)
        super().__init__("context_length_exceeded", detail)


class CapabilityError(BackendRequestError):
    """Backend lacks a required capability (e.g. full-distribution queries)."""
