import pytest

from referral_game.game import ModelParams
from referral_game.rewards import geometric_scheme
from referral_game.tree import build_tree


@pytest.fixture
def base_params():
    return ModelParams(lambda_arrival=0.2, reward=15.0, cost=1.0)


@pytest.fixture
def chain2():
    return build_tree([None, 0])


@pytest.fixture
def chain3():
    return build_tree([None, 0, 1])


@pytest.fixture
def star4():
    return build_tree([None, 0, 0, 0, 0])


@pytest.fixture
def geo2():
    return geometric_scheme(2)


def pytest_terminal_summary(terminalreporter):
    from .acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
