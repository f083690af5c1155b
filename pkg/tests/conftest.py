import pytest

from cogarith.experiments import ExperimentConfig, build_library
from cogarith.facts import ablate, default_ablation_mask

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def config():
    return ExperimentConfig(seed=0)


@pytest.fixture(scope="session")
def library(config):
    return build_library(config)


@pytest.fixture(scope="session")
def ablated(library):
    return ablate(library, default_ablation_mask())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
