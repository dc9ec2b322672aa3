"""Exception types shared across the toolkit."""


class LpnError(Exception):
    """Base class for all toolkit-specific errors."""


class InfeasiblePlanError(LpnError):
    """Raised when no valid attack parameters exist for the requested inputs.

    The message carries the reason (too few samples, negative block width,
    empty hypothesis space, ...).
    """


class ResourceBudgetError(LpnError):
    """Raised when a stage would exceed its configured memory budget.

    Carries the offending stage name and the size estimate that tripped
    the guard, so callers can attribute the failure.
    """

    def __init__(self, stage, estimate, budget):
        self.stage = stage
        self.estimate = estimate
        self.budget = budget
        super().__init__(
            f"{stage}: required size {estimate:.3g} exceeds budget {budget:.3g}"
        )
