"""Shared fixtures and the acceptance-criterion summary printer."""

import pytest

_ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, description: str, passed: bool = True) -> None:
    """Collect one acceptance line; printed in the terminal summary."""
    status = "PASS" if passed else "FAIL"
    line = f"[criterion {number}] {status} - {description}"
    _ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(set(_ACCEPTANCE_LINES)):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def weather_dataset_300():
    """Weather-delayed synthetic sample reused by dimred/featsel tests."""
    from iropskit.synth import generate, weather_delayed_config

    return generate(weather_delayed_config(300, seed=11))
