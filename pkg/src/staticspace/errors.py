"""Exception hierarchy shared by all modules."""


class GeometryError(ValueError):
    """A geometry or field violates one of its construction invariants."""

    def __init__(self, message, *, constraint=None, key=None):
        super().__init__(message)
        self.constraint = constraint
        self.key = key


class GeometryMismatchError(GeometryError):
    """A field was used with a geometry other than the one it samples."""


class UnsupportedFieldError(GeometryError):
    """The operation does not support this field/geometry combination."""


class PreconditionError(ValueError):
    """An operation was called outside its mathematical preconditions."""


class DomainError(ValueError):
    """A warping function is not positive on its declared domain."""


class ConvergenceError(RuntimeError):
    """An iterative solver stopped before reaching its tolerance."""

    def __init__(self, message, *, last_residual=float("nan"), iterations=0):
        super().__init__(message)
        self.last_residual = last_residual
        self.iterations = iterations


class PositivityError(RuntimeError):
    """A converged principal eigenvector changes sign."""


class ConfigError(ValueError):
    """Invalid run configuration; ``path`` locates the offending key."""

    def __init__(self, message, *, path=()):
        where = "/".join(str(p) for p in path) or "<root>"
        super().__init__(f"{where}: {message}")
        self.path = tuple(path)
