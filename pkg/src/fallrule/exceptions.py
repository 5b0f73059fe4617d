class DataError(ValueError):
    """Input data is malformed or unusable."""


class SchemaMismatch(DataError):
    """A model refers to predicates that the dataset does not define."""


class DegenerateLabels(DataError):
    """The dataset contains only one class."""


class ZeroCapture(ValueError):
    """An antecedent captures no rows that are still uncovered by the prefix."""


class OracleGuardError(ValueError):
    """Instance is too large for exhaustive enumeration."""


class OracleViolation(AssertionError):
    """A bound or optimality claim was contradicted by exhaustive enumeration."""
