import math

from hypothesis import strategies as st

from clustercompare.core import Clustering


@st.composite
def label_lists(draw, min_n=1, max_n=40, max_k=None):
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    k = draw(st.integers(min_value=1, max_value=max_k or n))
    return draw(st.lists(st.integers(min_value=0, max_value=k - 1), min_size=n, max_size=n))


@st.composite
def clustering_pairs(draw, min_n=2, max_n=40):
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    ka = draw(st.integers(min_value=1, max_value=n))
    kb = draw(st.integers(min_value=1, max_value=n))
    la = draw(st.lists(st.integers(0, ka - 1), min_size=n, max_size=n))
    lb = draw(st.lists(st.integers(0, kb - 1), min_size=n, max_size=n))
    return Clustering.from_label_sequence(la), Clustering.from_label_sequence(lb)


@st.composite
def size_sequences(draw, min_n=1, max_n=30):
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    sizes = []
    rest = n
    while rest:
        s = draw(st.integers(min_value=1, max_value=rest))
        sizes.append(s)
        rest -= s
    return sizes


def rel_close(x, y, rel, zero_abs=1e-13):
    if y == 0:
        return abs(x) <= zero_abs
    return abs(x - y) <= rel * abs(y)


LOG2 = math.log(2)


# criterion number -> (passed, detail), filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"CRITERION {number}: {'PASS' if passed else 'FAIL'}  {detail}")
