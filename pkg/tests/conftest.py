import pytest

from twintree import __prog__
from twintree.cli import TwinTreeCLI
from twintree.construct import make
from tests import fixture


@pytest.fixture(scope="session", autouse=True)
def display():
    """
    Return a display
    :return:
    """
    from ansible.utils.display import Display

    display = Display()
    display.verbosity = 3
    return display


@pytest.fixture
def twintree_cli(request) -> TwinTreeCLI:
    """
    A parsed CLI. The request param is the list of arguments; the items ending with ".tree" are names of documents in
    the fixtures.
    :return:
    """
    args_params = [
        fixture(arg) if arg.endswith(".tree") else arg for arg in request.param
    ]
    cli = TwinTreeCLI([__prog__] + args_params)
    cli.parse()
    return cli


@pytest.fixture(name="caterpillar")
def fixture_caterpillar():
    return make("caterpillar")


@pytest.fixture(name="ray")
def fixture_ray():
    return make("ray")
