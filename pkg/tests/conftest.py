import numpy as np
import pytest

from pulsesynth import SynthesisConfig, gaussian_rr, preset, synthesize


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def record7_rr():
    """8 minutes at 125 Hz drawn around the RR statistics of one RSR record (665.45 +- 3.09 ms)."""
    return gaussian_rr(665.45, 3.09, 60_000, 125.0, seed=7)


@pytest.fixture(scope="session")
def record7_config(record7_rr):
    return SynthesisConfig(preset("RSR"), record7_rr, 125.0, n_samples=60_000)


@pytest.fixture(scope="session")
def record7_pair(record7_config):
    return synthesize(record7_config)


_acceptance_lines: list[str] = []


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    report = yield
    mark = item.get_closest_marker("acceptance")
    if mark is not None and (report.when == "call" or (report.when == "setup" and report.failed)):
        number, title = mark.args
        detail = dict(item.user_properties).get("detail", "")
        status = "PASS" if report.passed else "FAIL"
        _acceptance_lines.append(f"[{status}] criterion {number}: {title}  {detail}".rstrip())
    return report


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_acceptance_lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
