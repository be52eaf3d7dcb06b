"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the region where a function is defined."""


class BudgetExceededError(RuntimeError):
    """A certified truncation needs more terms than the budget allows."""


class OutOfTableError(ValueError):
    """A density evaluation point lies beyond the convolution table depth."""
