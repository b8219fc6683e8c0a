"""Acceptance suite: one test per end-to-end criterion.

The slow Monte Carlo criteria dominate the runtime of the whole test run;
each criterion prints its one-line detail so a failure names the offending
quantity directly.
"""
import pytest

from esac import acceptance


@pytest.mark.parametrize(
    "criterion",
    acceptance.ALL_CRITERIA,
    ids=[fn.__name__ for fn in acceptance.ALL_CRITERIA],
)
def test_criterion(criterion):
    result = criterion()
    print(f"criterion {result.number} ({result.name}): {result.detail}")
    assert result.passed, f"criterion {result.number} {result.name}: {result.detail}"


def test_run_all_reports_every_criterion(monkeypatch):
    # run_all is exercised against stub criteria; the real ones run above.
    stub_pass = lambda: acceptance.CriterionResult(1, "stub", True, "fine")
    stub_fail = lambda: acceptance.CriterionResult(2, "stub", False, "broken")
    monkeypatch.setattr(acceptance, "ALL_CRITERIA", (stub_pass, stub_fail))
    lines = []
    results = acceptance.run_all(verbose_print=lines.append)
    assert [r.passed for r in results] == [True, False]
    assert lines[0].startswith("[PASS]")
    assert lines[1].startswith("[FAIL] criterion 2")
