"""Acceptance criteria, one test per criterion; the PASS/FAIL lines are echoed in the terminal summary."""

import pytest

from nvgates import acceptance


@pytest.mark.parametrize("check", acceptance.CRITERIA, ids=lambda c: f"criterion_{c.number}")
def test_criterion(check, acceptance_log):
    result = check()
    print(result.line())
    acceptance_log.append(result.line()[:400])
    assert result.passed, result.detail


def test_alternative_models_reported(acceptance_log):
    lines = acceptance.alternative_models()
    acceptance_log.extend(f"     alternative {line}" for line in lines)
    assert len(lines) == 4
