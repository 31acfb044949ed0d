"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: parse errors 2, validation errors 3,
configuration errors 4, anything else 10.
"""


class SparseQEError(Exception):
    """Base class for all toolkit errors."""


class ParseError(SparseQEError):
    def __init__(self, line, column, message):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"line {line}, col {column}: {message}")


class ValidationError(SparseQEError):
    """An artifact (decomposition, file header, ...) failed a consistency check."""


class InvalidDecomposition(ValidationError):
    """A tree decomposition does not decompose the graph it was paired with."""


class ConfigError(SparseQEError):
    """Unusable user-supplied configuration."""


class MixedMode(ConfigError):
    """Linear pipeline requested on nonlinear input (or vice versa)."""


class MissingAssignment(SparseQEError):
    """A point passed to an evaluator leaves some variable unassigned."""


class ZeroPolynomial(SparseQEError):
    """Operation undefined for the zero polynomial."""


class DegreeZero(SparseQEError):
    """Resultant requested w.r.t. a variable absent from an input."""


class DegreeTooLow(SparseQEError):
    """Discriminant requested for a polynomial of degree < 2."""


class InexactDivision(SparseQEError):
    """An exact polynomial division left a remainder; signals an internal bug."""


class DisconnectedGraph(SparseQEError):
    """Operation requires a connected graph."""


class EmptySet(SparseQEError):
    """Operation undefined for an empty collection."""


class CapExceeded(SparseQEError):
    """An elimination run exceeded its configured atom budget."""

    def __init__(self, cap, at_step=None):
        self.cap = cap
        self.at_step = at_step
        super().__init__(f"atom budget {cap} exceeded" +
                         (f" at step {at_step}" if at_step is not None else ""))
