"""Exception types raised by the solvers and geometry routines."""


class SparsePolarError(Exception):
    """Base class for all errors raised by this package."""


class InfeasibleError(SparsePolarError):
    """No nonnegative point satisfies the equality constraints."""


class UnboundedError(SparsePolarError):
    """The linear program objective is unbounded below."""


class UnboundedPolarError(SparsePolarError):
    """The polar polytope is unbounded because the atoms do not span the space."""


class GuardExceededError(SparsePolarError):
    """A brute-force enumeration would exceed the configured size guard."""


class InconsistentCertificateError(SparsePolarError):
    """A dual point is not an optimal certificate for the given observation."""
