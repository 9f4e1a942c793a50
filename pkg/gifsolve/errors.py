# Errors

from typing import Any, Optional


class InvalidInputError(RuntimeError):
    """
    Invalid input data or violated precondition.

    Commands that fail with this error exit with code 1.
    """

    exit_code = 1


class DimensionMismatchError(InvalidInputError):
    """
    Operands live in different ambient dimensions.
    """

    def __init__(self, expected: int, actual: int) -> None:
        """
        Parameters
        ----------
        expected : int
            Dimension of the first operand.
        actual : int
            Dimension of the offending operand.
        """
        super().__init__(f"Dimension mismatch: expected {expected}, got {actual}.")
        self.expected = expected
        self.actual = actual


class SpecError(InvalidInputError):
    """
    System specification with one or more violations.
    """

    def __init__(self, violations: list[str]) -> None:
        """
        Parameters
        ----------
        violations : list[str]
            All violations found in the document.
        """
        message = "Invalid system spec:\n" + "\n".join(f"  - {v}" for v in violations)
        super().__init__(message)
        self.violations = list(violations)


class BudgetExceededError(RuntimeError):
    """
    A cardinality or iteration budget was exceeded.

    Commands that fail with this error exit with code 2.
    """

    exit_code = 2

    def __init__(self, message: str, partial: Optional[Any] = None) -> None:
        """
        Parameters
        ----------
        message : str
            What exceeded which budget.
        partial : Optional[Any], default None
            Best result available when the budget was hit.
        """
        super().__init__(message)
        self.partial = partial


class ConvergenceError(RuntimeError):
    """
    An iterative routine hit its iteration cap.
    """

    def __init__(self, message: str, estimate: float) -> None:
        """
        Parameters
        ----------
        message : str
            Description of the failure.
        estimate : float
            Last estimate computed before giving up.
        """
        super().__init__(message)
        self.estimate = estimate


def exit_code_of(error: BaseException) -> int:
    """
    Return the process exit code for an error.

    The cause chain is searched so that errors re-raised by the command runner
    keep the exit code of their origin.

    Parameters
    ----------
    error : BaseException
        Raised error.

    Returns
    -------
    code : int
        2 for budget errors, 1 otherwise.
    """
    current: Optional[BaseException] = error
    while current is not None:
        code = getattr(current, "exit_code", None)
        if isinstance(code, int):
            return code
        current = current.__cause__
    return 1
