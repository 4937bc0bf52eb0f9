"""
Error Handling Module
Configurable strategies for running toolkit operations from the CLI and the
verify suites.
"""

import os
from abc import ABC, abstractmethod
from typing import Any, Callable, Dict

from dotenv import load_dotenv
from tenacity import RetryError, Retrying, retry_if_exception_type, stop_after_attempt

from utils.console import log

from .exceptions import CubicLabError, NoConvergence

load_dotenv()


def error_dict(error: CubicLabError, strategy: str, **extra) -> Dict[str, Any]:
    result = {
        "success": False,
        "error": error.name,
        "message": str(error),
        "strategy": strategy,
    }
    sample = getattr(error, "sample", None)
    if sample is not None:
        result["sample"] = sample
    result.update(extra)
    return result


def is_error(result: Any) -> bool:
    return isinstance(result, dict) and result.get("success") is False


class ErrorHandlingStrategy(ABC):
    """Base class for error handling strategies."""

    @abstractmethod
    def handle(self, func: Callable, *args, **kwargs) -> Any:
        """Run func(*args, **kwargs); return its result or an error dict."""


class CaptureErrorStrategy(ErrorHandlingStrategy):
    """Turn a domain error into an error dict (default strategy)."""

    def handle(self, func: Callable, *args, **kwargs) -> Any:
        try:
            return func(*args, **kwargs)
        except CubicLabError as e:
            return error_dict(e, "capture")


class RetryStrategy(ErrorHandlingStrategy):
    """Retry on NoConvergence, then capture like CaptureErrorStrategy."""

    def __init__(self, max_retries: int = 3):
        """
        Args:
            max_retries: Total number of attempts
        """
        self.max_retries = max_retries

    def handle(self, func: Callable, *args, **kwargs) -> Any:
        retrying = Retrying(
            stop=stop_after_attempt(self.max_retries),
            retry=retry_if_exception_type(NoConvergence),
            before_sleep=lambda state: log(
                f"Attempt {state.attempt_number} failed: {state.outcome.exception()}", "WARN"
            ),
        )
        try:
            return retrying(func, *args, **kwargs)
        except RetryError as e:
            last = e.last_attempt.exception()
            log(f"All {self.max_retries} attempts failed", "WARN")
            return error_dict(last, "retry", attempts=self.max_retries)
        except CubicLabError as e:
            return error_dict(e, "retry", attempts=1)


class ErrorHandler:
    """Runs toolkit operations under a strategy picked from the environment."""

    def __init__(self, strategy: ErrorHandlingStrategy = None):
        """
        Args:
            strategy: Explicit strategy; None reads CUBICLAB_ENABLE_RETRY
        """
        if strategy:
            self.strategy = strategy
        elif os.getenv("CUBICLAB_ENABLE_RETRY", "false").lower() == "true":
            self.strategy = RetryStrategy(max_retries=int(os.getenv("CUBICLAB_MAX_RETRIES", "3")))
        else:
            self.strategy = CaptureErrorStrategy()

    def execute(self, func: Callable, *args, **kwargs) -> Any:
        """Run func under the configured strategy."""
        return self.strategy.handle(func, *args, **kwargs)
