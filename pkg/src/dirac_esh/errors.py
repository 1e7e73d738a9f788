"""Exception hierarchy.

``PreconditionError`` and its subclasses mark numerical preconditions that a
caller violated (gapless fibers, ambiguous filling, invalid parameters); the
CLI maps them to exit status 2.
"""


class PreconditionError(ValueError):
    """A numerical precondition of an operation does not hold."""


class NotHermitianError(PreconditionError):
    pass


class GaplessError(PreconditionError):
    """The Dirac vector vanishes (or nearly so) where a gap is required."""


class AmbiguousFillingError(PreconditionError):
    """A zero-energy mode makes half filling ill-defined."""


class ConvergenceError(RuntimeError):
    pass


class ConfigError(ValueError):
    """Invalid run configuration; the CLI maps it to exit status 1."""


class DecoupledLimitWarning(RuntimeWarning):
    """``F*|d| -> 1``: the subsystem state is a projector, reported as ``T = 0``."""
