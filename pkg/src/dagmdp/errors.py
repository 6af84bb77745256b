"""Shared exception types."""


class InvariantError(ValueError):
    """A BlockDAG label rule or structural invariant would be violated."""


class ConfigError(ValueError):
    """Invalid user-supplied configuration (CLI exit code 2)."""


class BudgetExceededError(RuntimeError):
    """State-space exploration hit the configured state budget (CLI exit code 3)."""

    def __init__(self, budget: int):
        super().__init__(f"state budget exceeded: more than {budget} states reachable")
        self.budget = budget


class DegeneratePolicyError(RuntimeError):
    """Policy evaluation found (numerically) zero long-run progress."""
