import pytest

from loewner_lab import ConvergenceError, InvalidArgument, checks
from loewner_lab.checks import INVARIANT_CHECKS, InvariantCheck, run_invariant_suite

FAST_CHECKS = ["reflection", "tan-identity", "normalization", "monotone-growth", "vertical-slit-hcap", "mobius"]


@pytest.mark.parametrize("name", FAST_CHECKS)
def test_fast_invariants_pass(cfg, name):
    (result,) = run_invariant_suite(cfg, names=[name])
    assert isinstance(result, InvariantCheck)
    assert result.passed, result.detail


@pytest.mark.slow
@pytest.mark.parametrize("name", ["weld-round-trip", "scaling", "arc-trace"])
def test_slow_invariants_pass(cfg, name):
    (result,) = run_invariant_suite(cfg, names=[name])
    assert result.passed, result.detail


@pytest.mark.slow
def test_full_invariant_suite(cfg):
    results = run_invariant_suite(cfg)
    assert [r.name for r in results] == list(INVARIANT_CHECKS)
    failed = [f"{r.name}: {r.detail}" for r in results if not r.passed]
    assert not failed


def test_unknown_check_is_rejected(cfg):
    with pytest.raises(InvalidArgument):
        run_invariant_suite(cfg, names=["hcap-positivity"])


def test_numerical_failure_is_reported_as_failed_check(cfg, monkeypatch):
    def failing(cfg):
        raise ConvergenceError("did not converge")

    monkeypatch.setitem(checks.INVARIANT_CHECKS, "mobius", failing)
    (result,) = run_invariant_suite(cfg, names=["mobius"])
    assert not result.passed
    assert "ConvergenceError" in result.detail
