"""Exception types shared by the nilcat modules."""


class NilcatError(Exception):
    """Base class for all nilcat errors."""


class DomainError(NilcatError, ValueError):
    """Parameters outside the admissible region (alpha <= 0, (alpha, theta)
    outside the open parameter set where the quartic stays positive, ...)."""


class RangeError(NilcatError, ValueError):
    """Requested evaluation would overflow (|A| beyond the cosh budget)."""


class ResolutionError(NilcatError, ValueError):
    """Grid or sample count too small for the requested operation, or a
    solver tolerance finer than the grid can support."""


class DegeneracyError(NilcatError, RuntimeError):
    """First fundamental form numerically degenerate at the sample point."""


class TransversalityError(NilcatError, RuntimeError):
    """Tangent plane vertical at the sample point; the Gauss map has no
    finite value there."""


class BracketError(NilcatError, RuntimeError):
    """A sign bracket guaranteed by the theory failed numerically.  This
    always indicates a bug or broken input, never a tolerance issue, so it
    aborts loudly."""
