import pytest

from chiralcavity.config import parse_config

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def fig2a():
    return parse_config("propanediol_fig2a.cfg")


@pytest.fixture(scope="session")
def snr_cfg():
    return parse_config("propanediol_snr_check.cfg")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
