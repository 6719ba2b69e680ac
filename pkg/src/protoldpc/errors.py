"""Exception hierarchy shared across the package.

Every exception carries a machine-parsable ``category`` used by the CLI to
derive exit codes, so batch drivers can branch on failure class without
scraping messages.
"""

from __future__ import annotations


class ProtoLdpcError(Exception):
    """Base class for all package errors."""

    category = "internal"


class ParameterError(ProtoLdpcError):
    """An argument violates a documented precondition."""

    category = "parameter"


class NumericError(ProtoLdpcError):
    """A numerical routine failed to reach its accuracy contract."""

    category = "numeric"


class DegenerateLevelError(NumericError):
    """A bit level has zero prior mass for one of its values."""

    category = "degenerate-level"

    def __init__(self, level: int, message: str = ""):
        self.level = level
        super().__init__(message or f"bit level {level} is degenerate")


class BracketError(ProtoLdpcError):
    """A root/threshold search bracket does not enclose the answer.

    Scans that measured partial data before failing attach it as ``curve``
    (a tuple of per-point results) so callers can widen the bracket
    without rerunning what already succeeded.
    """

    category = "bracket"

    def __init__(self, message: str, curve: tuple = ()):
        self.curve = tuple(curve)
        super().__init__(message)


class ConstructionError(ProtoLdpcError):
    """Graph or encoder construction failed structurally."""

    category = "construction"


class RankDeficiencyError(ConstructionError):
    """Parity submatrix is singular; lists the dependent rows."""

    def __init__(self, dependent_rows: list[int]):
        self.dependent_rows = list(dependent_rows)
        super().__init__(
            "parity columns do not span all checks; dependent rows: "
            + ", ".join(map(str, self.dependent_rows))
        )


class ParseError(ProtoLdpcError):
    """Malformed input file; records the 1-based line number."""

    category = "parse"

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(message + where)


class SearchError(ProtoLdpcError):
    """A stochastic search could not produce a feasible result."""

    category = "search"
