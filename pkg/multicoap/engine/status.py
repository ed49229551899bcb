import functools
from enum import Enum
from typing import Any, Callable

from ..core.errors import InternalError, MultiCoapError
from ..utils.logs import get_logger


class Status(Enum):
    """
    Base class for all statuses - enables conversion between status classes sharing values.
    """

    @classmethod
    def from_status(cls, status: "Status") -> "Status":
        try:
            return cls(status.value)
        except ValueError:
            raise ValueError(
                f"Status not found: {status}. Check your conversion from {status.__class__} to {cls}."
            )

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}.{self.name}"


class FitStatus(Status):
    """
    State of the outer variational EM loop.
    """

    INITIALIZED: int = 0
    RUNNING: int = 1
    CONVERGED: int = 2
    MAX_ITER: int = 3

    def __str__(self) -> str:
        if self == FitStatus.INITIALIZED:
            return "Parameters initialized, no cycle run yet."
        elif self == FitStatus.RUNNING:
            return "Cycling through the E-step and M-step blocks."
        elif self == FitStatus.CONVERGED:
            return "Relative ELBO change fell below the tolerance."
        return "Stopped at the iteration limit without meeting the tolerance."

    def __bool__(self) -> bool:
        return self == FitStatus.CONVERGED


class BlockStatus(Status):
    """
    Outcome of a single block update.
    """

    SUCCESS: int = 1
    FAILURE: int = 0

    @classmethod
    def status(cls, func: Callable) -> Callable:
        """
        Decorator logging the failing block before re-raising. Errors that are not part of
        the package hierarchy are wrapped into `InternalError`.
        """
        status_logger = get_logger(__name__)

        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            try:
                return func(*args, **kwargs)
            except MultiCoapError as e:
                status_logger.error(f"Block {func.__name__} failed with {cls.FAILURE!r}: {e}")
                raise
            except (ArithmeticError, ValueError) as e:
                status_logger.error(f"Block {func.__name__} failed with {cls.FAILURE!r}: {e}")
                raise InternalError(f"{func.__name__}: {e}") from e

        return wrapper
