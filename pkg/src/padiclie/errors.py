"""Shared exception types."""


class PrecisionError(ArithmeticError):
    """Raised when a result cannot be certified exact at the working precision."""


class StructureMismatchError(ValueError):
    """Operands do not share (p, prec) or have incompatible shapes."""


class NotInvertibleError(ArithmeticError):
    """Element is not a unit at the working precision."""


class DegenerateError(ValueError):
    """Generators are rank deficient at the working precision."""


class NotSubmoduleError(ValueError):
    """Claimed submodule is not contained in the ambient lattice."""


class HypothesisViolatedError(ValueError):
    """Input violates a stated hypothesis of the check being run."""


class CapExceededError(RuntimeError):
    """An exhaustive enumeration or grid exceeds its configured cap."""


class NonCanonicalInputError(ValueError):
    """Serialized data is not in canonical form and normalization was not requested."""
