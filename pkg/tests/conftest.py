import numpy as np
import pytest

from gcflow.core import InitialProfile

_criteria: list[tuple[str, bool, str]] = []


@pytest.fixture
def record_criterion():
    """Log one acceptance line; the terminal summary prints them all."""

    def record(label: str, passed: bool, detail: str = "") -> bool:
        _criteria.append((label, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in _criteria:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")


def sinusoid_with_infimum(m: float, amplitude: float = 1.0) -> InitialProfile:
    """DecayingSinusoid shifted so that inf f equals m."""
    probe = InitialProfile("DecayingSinusoid", 2.0, amplitude)
    return InitialProfile("DecayingSinusoid", 2.0 - (probe.m - m), amplitude)


@pytest.fixture(scope="session")
def bump():
    return InitialProfile("BumpOnConstant", 1.0, 1.0, 1.0)


@pytest.fixture(scope="session")
def presets():
    """One profile per preset, each with inf f >= 1."""
    return {
        "Constant": InitialProfile("Constant", 2.0),
        "BumpOnConstant": InitialProfile("BumpOnConstant", 1.0, 1.0, 1.0),
        "SmoothedStep": InitialProfile("SmoothedStep", 1.0, 1.0, 1.0),
        "DecayingSinusoid": sinusoid_with_infimum(1.0),
    }


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
