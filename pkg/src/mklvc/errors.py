"""Exception hierarchy.

Two broad families map onto CLI exit codes: ValidationError (bad inputs,
malformed files, mismatched shapes) exits 1, NumericalError (eigen-solver
failure, indefinite or singular matrices, diverged scalings) exits 2.
"""


class MklvcError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(MklvcError):
    """Invalid input: shapes, ranges, parameters, or file contents."""


class DimensionMismatchError(ValidationError):
    """Operands have incompatible dimensions."""


class InsufficientSamplesError(ValidationError):
    """Too few frames/samples for the requested statistic."""


class InvalidBlockDimError(ValidationError):
    """Block dimension does not divide the embedding dimension."""


class EmbeddingFileError(ValidationError):
    """Malformed embedding container file.

    Carries the file path and the byte offset at which parsing failed.
    """

    def __init__(self, message, path=None, offset=None):
        self.path = path
        self.offset = offset
        where = ""
        if path is not None:
            where += f" [{path}"
            where += f" @ byte {offset}]" if offset is not None else "]"
        super().__init__(message + where)


class NumericalError(MklvcError):
    """A numeric computation failed beyond recoverable tolerance."""


class EigenDecompositionError(NumericalError):
    """Symmetric eigen-solver did not converge."""

    def __init__(self, dim):
        self.dim = dim
        super().__init__(f"symmetric eigendecomposition failed to converge for a {dim}x{dim} matrix")


class NotPositiveSemidefiniteError(NumericalError):
    """Matrix has genuinely negative eigenvalues (beyond rounding noise)."""


class SingularMatrixError(NumericalError):
    """Matrix is singular (or numerically so) where an inverse is required.

    ``block_index`` is set when the failure occurred while fitting one block
    of a factorized map.
    """

    def __init__(self, message, block_index=None):
        self.block_index = block_index
        if block_index is not None:
            message = f"{message} (block {block_index})"
        super().__init__(message)


class SinkhornNumericalError(NumericalError):
    """Sinkhorn scaling produced NaN; a larger epsilon usually fixes this."""
