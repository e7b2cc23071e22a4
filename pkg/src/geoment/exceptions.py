class DimensionError(ValueError):
    """Shapes, orders or local dimensions of the operands disagree."""


class BudgetError(ValueError):
    """A dense object or grid would exceed the configured size budget."""


class NormalizationError(ValueError):
    """An operation that requires unit-norm input received something else."""
