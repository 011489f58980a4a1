"""Exception types shared across the package."""


class MagnomechError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(MagnomechError, ValueError):
    """Invalid or inconsistent physical parameters."""


class ConfigError(MagnomechError, ValueError):
    """Malformed parameter file or override string."""


class DegenerateDenominatorError(MagnomechError):
    """Linear response denominator vanished (parametric resonance)."""


class NonConvergenceError(MagnomechError):
    """Fixed-point iteration failed to converge (bistable or oscillatory)."""


class UnstableSystemError(MagnomechError):
    """Drift matrix has a non-negative Lyapunov exponent; no steady state."""


class SingularSolveError(MagnomechError):
    """The vectorized Lyapunov system is numerically singular."""


class EigenSolveError(MagnomechError):
    """Dense eigenvalue computation failed to converge."""


class NonPhysicalCMError(MagnomechError):
    """Covariance matrix violates positivity beyond tolerance."""


class CrossCheckMismatchError(MagnomechError):
    """Two independent routes to the same quantity disagree."""


class BracketInvalidError(MagnomechError):
    """Bisection bracket does not straddle the sought boundary."""
