"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A parameter combination violates its documented constraints."""


class BudgetExceededError(RuntimeError):
    """The brute-force decoder loop count exceeds the configured budget."""

    def __init__(self, loop_count: int, budget: int):
        super().__init__(
            f"partition-and-merge loop count {loop_count} exceeds budget {budget}"
        )
        self.loop_count = loop_count
        self.budget = budget
