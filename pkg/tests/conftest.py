import pytest

from evalfuse import problemfile

EXPERTS = ["Mkt", "Fin", "Prod", "HR"]
CRITERIA = ["Ana", "Lear", "Exp", "Com", "Dec", "Crea"]


@pytest.fixture(scope="session")
def hiring():
    problem, name = problemfile.load_problem(problemfile.fixture_path())
    return problem


@pytest.fixture(scope="session")
def hiring_named():
    return problemfile.load_problem(problemfile.fixture_path())
