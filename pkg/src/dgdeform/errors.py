"""Exception types shared by every layer of the package."""


class DeformError(Exception):
    """Base class for all errors raised by dgdeform."""


class StructuralError(DeformError, ValueError):
    """Inputs do not fit together (wrong owner, wrong degree, unknown name)."""


class PreconditionError(DeformError, ValueError):
    """A mathematical precondition failed.

    ``witness`` carries whatever made the check fail, for example the
    nonzero Maurer-Cartan residual.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ParseError(DeformError, ValueError):
    """Syntax error in a model document, with a 1-based line and column."""

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        super().__init__(message + where)
        self.line = line
        self.column = column


class SemanticError(DeformError, ValueError):
    """A well-formed document that does not describe a valid object."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
