"""Exception types shared across the toolkit."""

from __future__ import annotations


class PolarnetError(Exception):
    """Base class for all toolkit-specific errors."""


class ParseError(PolarnetError):
    """A delimited input stream contained a malformed record (strict mode)."""

    def __init__(self, message: str, line_number: int | None = None, line: str | None = None):
        super().__init__(message)
        self.line_number = line_number
        self.line = line


class FormatError(PolarnetError):
    """A structured file (e.g. a partition file) violates its format contract."""


class UndefinedModularityError(PolarnetError):
    """Modularity is undefined because the graph has no edges."""


class DegenerateModularityError(PolarnetError):
    """A group-contribution ratio was requested while |Q| is below tolerance."""


class InfeasibleCoverageError(PolarnetError):
    """The requested coverage target exceeds what the candidate set can reach.

    Carries the state of the greedy run at exhaustion so callers can report
    the partial result instead of just failing.
    """

    def __init__(
        self,
        target: int,
        n_target: int,
        max_coverable: int,
        selected: list[int],
        covered_after_step: list[int],
    ):
        frac = max_coverable / n_target if n_target else 0.0
        super().__init__(
            f"coverage target {target} of {n_target} is unreachable: "
            f"candidate set covers at most {max_coverable} ({frac:.1%})"
        )
        self.target = target
        self.n_target = n_target
        self.max_coverable = max_coverable
        self.selected = selected
        self.covered_after_step = covered_after_step
