"""Exception hierarchy shared by every module."""


class QLeakError(Exception):
    """Base class for all library errors."""


class FieldError(QLeakError, ValueError):
    """Bad field parameters, mismatched contexts or illegal arithmetic."""


class InputError(QLeakError, ValueError):
    """Malformed user input (selectors, JSON specs, precondition violations)."""


class BudgetExceeded(QLeakError):
    """An enumeration would exceed its configured budget."""


class VerificationFailure(QLeakError):
    """A theorem-level check found a counterexample."""

    def __init__(self, suite, counterexample):
        super().__init__(f"verification failed in suite {suite!r}")
        self.suite = suite
        self.counterexample = counterexample
