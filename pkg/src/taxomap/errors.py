"""Exception types shared across the package."""
from __future__ import annotations


class TaxomapError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(TaxomapError):
    """A line-oriented input file could not be parsed."""

    def __init__(self, message: str, *, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        prefix = ""
        if path is not None:
            prefix += f"{path}:"
        if line is not None:
            prefix += f"line {line}:"
        super().__init__(f"{prefix} {message}" if prefix else message)


class GraphValidationError(TaxomapError):
    """A sense graph violates one or more structural invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(v.message for v in self.violations)
        super().__init__(f"invalid graph: {lines}")


class UnknownNodeError(TaxomapError):
    """A synset id was looked up in a graph that does not contain it."""


class ConfigError(TaxomapError):
    """A constraint set or generator configuration is not usable."""


class DependencyError(TaxomapError):
    """A constraint needs a frozen mapping for another part of speech."""


class EvalInputError(TaxomapError):
    """Gold data and mapping output do not describe the same problem."""


class RelaxationInvariantError(TaxomapError):
    """The solver state left its invariant envelope; this is a bug guard."""
