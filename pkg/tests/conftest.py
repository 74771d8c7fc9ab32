import pytest

from symkdv.reductions import Kind, ReducedProblem, solve_reduced

_ACCEPTANCE = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def problem1_solution():
    return solve_reduced(ReducedProblem(Kind.PROBLEM1, 25))


@pytest.fixture(scope="session")
def problem2_solutions():
    return {t: solve_reduced(ReducedProblem(Kind.PROBLEM2, 25, t_param=t)) for t in (1.0, 2.0, 3.0)}
