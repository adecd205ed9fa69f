"""Exception types shared across the package."""


class EmptySetError(ValueError):
    """A geometric operation produced an empty point set."""


class DegenerateGraphError(ValueError):
    """A point set has no nearest-neighbor bonds to hop along."""


class StructureError(ValueError):
    """A point set lacks the structure an operation requires (e.g. bipartite tags)."""


class PreconditionError(ValueError):
    """An input violates a documented precondition."""


class ResolutionError(RuntimeError):
    """A grid or quadrature rule is too coarse for the requested accuracy."""


class LambdaTooSmallError(RuntimeError):
    """The coupling is too small for the orbital Gramian to be provably invertible."""


class DefinitenessError(RuntimeError):
    """A matrix that must be positive definite has a non-positive eigenvalue."""


class GapError(ValueError):
    """A spectral window endpoint collides with an eigenvalue."""


class SizeError(ValueError):
    """A dense operation was requested beyond the supported matrix size."""


class InvalidWindowError(ValueError):
    """A smooth-step transition window is not contained in a bulk spectral gap."""


class SolverError(RuntimeError):
    """An eigensolver failed to converge or failed its residual gate."""
