"""Exception hierarchy shared by every structflo.opspec module."""

from __future__ import annotations


class OpspecError(Exception):
    """Base class for all errors raised by structflo.opspec."""


class ShapeError(OpspecError, ValueError):
    """Operands live on different blocks, grids, or coefficient dimensions."""


class GridTooCoarseError(ShapeError):
    """The grid has fewer nodes than a stencil needs."""


class MatrixValidationError(OpspecError, ValueError):
    """A matrix input violates its Hermitian / definite / unitary invariant."""

    def __init__(self, message: str, residual: float | None = None) -> None:
        super().__init__(message)
        self.residual = residual


class BoundaryEncodingError(OpspecError, ArithmeticError):
    """A boundary closure or boundary-constraint projection is singular."""

    def __init__(self, message: str, condition: float | None = None) -> None:
        super().__init__(message)
        self.condition = condition


class EigenSolverError(OpspecError, RuntimeError):
    """The dense eigensolver did not converge."""

    def __init__(self, message: str, converged: int = 0) -> None:
        super().__init__(message)
        self.converged = converged


class ResourceCapError(OpspecError, RuntimeError):
    """A request exceeds a configured size cap."""


class MatchingError(OpspecError, LookupError):
    """A reference eigenvalue has no partner within the pairing radius."""


class ConfigError(OpspecError, ValueError):
    """A problem configuration failed to parse or validate.

    Attributes:
        path: Field path of the offending value, e.g. ``"blocks[1].A.re"``.
        block: 1-based block number, when the failure belongs to one block.
        line: Source line of a JSON syntax error.
    """

    def __init__(
        self,
        message: str,
        path: str | None = None,
        block: int | None = None,
        line: int | None = None,
    ) -> None:
        super().__init__(message)
        self.path = path
        self.block = block
        self.line = line
