import pytest
from hypothesis import settings, strategies as st

from missing_mass.spectrum import SampleMatrix

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@st.composite
def matrices(draw, max_n=12, max_features=10, min_n=1):
    n = draw(st.integers(min_n, max_n))
    width = draw(st.integers(0, max_features))
    rows = draw(st.lists(st.sets(st.integers(0, max(width - 1, 0)), max_size=width), min_size=n, max_size=n))
    if width == 0:
        rows = [set() for _ in rows]
    return SampleMatrix.from_sets(rows)


def random_matrix(rng, n, n_features, density=0.3):
    return SampleMatrix.from_dense(rng.random((n, n_features)) < density)


@pytest.fixture
def abc_matrix():
    # {A,B}, {A}, {A,C} with A=0, B=1, C=2
    return SampleMatrix.from_sets([{0, 1}, {0}, {0, 2}], labels=("A", "B", "C"))


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(acceptance_log.LINES, key=lambda l: int(l.split()[1])):
            terminalreporter.write_line(line)
