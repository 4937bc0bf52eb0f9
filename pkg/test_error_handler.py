"""
Error Handler Test
Capture and retry strategies, and the agreement summary used by the verify
suites.
"""

import pytest

from hesse.agreement_validator import AgreementValidator
from hesse.error_handler import CaptureErrorStrategy, ErrorHandler, RetryStrategy, is_error
from hesse.exceptions import DomainError, HypothesisFailed, NoConvergence


class FlakySolver:
    """Fails with NoConvergence a fixed number of times, then returns."""

    def __init__(self, failures: int):
        self.failures = failures
        self.calls = 0

    def __call__(self, value):
        self.calls += 1
        if self.calls <= self.failures:
            raise NoConvergence(f"attempt {self.calls}")
        return value


def _raise(error):
    raise error


def test_capture_returns_error_dict():
    handler = ErrorHandler(CaptureErrorStrategy())
    assert handler.execute(lambda x: x + 1, 1) == 2
    result = handler.execute(_raise, HypothesisFailed("not negative", sample=[1.0, 0.0, 0.0]))
    assert is_error(result)
    assert result["error"] == "HypothesisFailed"
    assert result["strategy"] == "capture"
    assert result["sample"] == [1.0, 0.0, 0.0]


def test_capture_lets_other_errors_through():
    handler = ErrorHandler(CaptureErrorStrategy())
    with pytest.raises(ValueError):
        handler.execute(_raise, ValueError("bad flag"))


def test_retry_recovers():
    solver = FlakySolver(failures=2)
    assert ErrorHandler(RetryStrategy(max_retries=3)).execute(solver, 7) == 7
    assert solver.calls == 3


def test_retry_gives_up():
    solver = FlakySolver(failures=5)
    result = ErrorHandler(RetryStrategy(max_retries=2)).execute(solver, 7)
    assert is_error(result)
    assert result["error"] == "NoConvergence"
    assert result["attempts"] == 2
    assert solver.calls == 2


def test_retry_does_not_repeat_domain_errors():
    result = ErrorHandler(RetryStrategy(max_retries=3)).execute(_raise, DomainError("E inside"))
    assert result["error"] == "DomainError"
    assert result["attempts"] == 1


def test_default_strategy_from_env(monkeypatch):
    monkeypatch.setenv("CUBICLAB_ENABLE_RETRY", "true")
    monkeypatch.setenv("CUBICLAB_MAX_RETRIES", "4")
    handler = ErrorHandler()
    assert isinstance(handler.strategy, RetryStrategy)
    assert handler.strategy.max_retries == 4
    monkeypatch.setenv("CUBICLAB_ENABLE_RETRY", "false")
    assert isinstance(ErrorHandler().strategy, CaptureErrorStrategy)


def test_agreement_summary():
    comparisons = [
        {"id": "a", "analytic": {"C1": 2, "RB2": 0}, "sampled": {"C1": 2}},
        {"id": "b", "analytic": {"C1": 1}, "sampled": {"C1": 1, "RB2": 1}},
        {"id": "c", "analytic": None, "sampled": {"C1": 1}},
        {"id": "d", "analytic": {"R": 2}, "sampled": {"B1R": 1, "RB2": 1}, "tie": True},
    ]
    result = AgreementValidator().validate(comparisons)
    summary = result["agreement_summary"]
    assert (summary["agree"], summary["disagree"], summary["unpredicted"], summary["tie"]) == (1, 1, 1, 1)
    assert summary["agreement_rate"] == 0.5
    assert not summary["passed"]
    assert AgreementValidator(agreement_threshold=0.5).validate(comparisons)["agreement_summary"]["passed"]
    assert [row["status"] for row in result["comparisons"]] == ["agree", "disagree", "unpredicted", "tie"]


def main():
    tests = [
        test_capture_returns_error_dict, test_capture_lets_other_errors_through, test_retry_recovers,
        test_retry_gives_up, test_retry_does_not_repeat_domain_errors, test_agreement_summary,
    ]
    failed = 0
    for test in tests:
        try:
            test()
            print(f"[OK] {test.__name__}")
        except Exception as e:
            failed += 1
            print(f"[FAILED] {test.__name__}: {e}")
    print(f"\n{len(tests) - failed}/{len(tests)} passed")
    return failed == 0


if __name__ == "__main__":
    main()
