"""Shared fixtures and the acceptance checklist reporter."""

from __future__ import annotations

import numpy as np
import pytest

from eatmon import synth

CRITERION_LINES: list[str] = []


def record_criterion(number: int, passed: bool, detail: str) -> None:
    """Collect one checklist line; printed after the run ends."""
    status = "pass" if passed else "FAIL"
    CRITERION_LINES.append(f"criterion {number} [{status}] {detail}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not CRITERION_LINES:
        return
    terminalreporter.section("acceptance checklist")
    for line in sorted(CRITERION_LINES):
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_trace():
    """A short clean trace with a single fork delivery."""
    scenario = synth.SynthScenario(
        duration_s=10.0,
        seed=42,
        noise_std=0.02,
        events=(synth.delivery(3.0, "fork"),),
    )
    trace, truth = synth.generate(scenario)
    return trace, truth
