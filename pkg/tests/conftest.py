import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from rospace.fixtures import build, fixture_tree
from rospace.words import FreeFactorSystem, Word

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

F2 = FreeFactorSystem.standard(2)
F2A = FreeFactorSystem.standard(2, [1])


def words(alphabet=("a", "b"), max_size=8):
    letters = st.tuples(st.sampled_from(alphabet), st.sampled_from((1, -1)))
    return st.lists(letters, max_size=max_size).map(Word)


def W(text):
    return Word.parse(text)


@pytest.fixture(scope="session")
def T1():
    return fixture_tree("t1")


@pytest.fixture(scope="session")
def X2sym():
    return build("x2-middle-symbolic")


@pytest.fixture(scope="session")
def T2sym():
    return fixture_tree("x2-middle-symbolic")


@pytest.fixture(scope="session")
def T2():
    return fixture_tree("x2-middle")


_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def acceptance_lines(request):
    return request.config.stash[_ACCEPTANCE]


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip("."))):
            terminalreporter.write_line(line)
