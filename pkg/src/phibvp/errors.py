"""Exception types shared across the package."""


class IterationCap(RuntimeError):
    """A bracket expansion or iteration exceeded its hard cap."""


class ValidationError(ValueError):
    """Invalid model data; ``field`` is a dotted path such as ``bc.alpha``."""

    def __init__(self, field, message):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


class ParseError(ValueError):
    """Syntax error in an expression; ``position`` is a byte offset."""

    def __init__(self, position, message, found=""):
        self.position = position
        self.message = message
        self.found = found
        super().__init__(f"at byte {position}: {message} (found {found!r})")


class DomainError(ArithmeticError):
    """Expression evaluated at a point where it is undefined."""

    def __init__(self, position, message):
        self.position = position
        self.message = message
        super().__init__(f"at byte {position}: {message}")


class NonConvergence(RuntimeError):
    """Continuation could not reach lambda = 1."""

    def __init__(self, lambda_reached, last_residual, message=""):
        self.lambda_reached = lambda_reached
        self.last_residual = last_residual
        super().__init__(
            message
            or f"stalled at lambda={lambda_reached:.6g} (last residual {last_residual:.3e})"
        )


class NoBracket(RuntimeError):
    """Shooting map showed no sign change over the search interval."""


class GridMismatch(ValueError):
    """Two grid functions live on different grids."""
