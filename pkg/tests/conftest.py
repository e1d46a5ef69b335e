import contextlib

import pytest

from assocext.coalgebra import GradedSpace, SplitSpace, phi

ACCEPTANCE = []


@pytest.fixture
def record():
    """Context manager recording one acceptance criterion as PASS or FAIL."""

    @contextlib.contextmanager
    def _record(number, text):
        try:
            yield
        except BaseException as exc:
            ACCEPTANCE.append((number, text, False, str(exc).splitlines()[0] if str(exc) else type(exc).__name__))
            raise
        ACCEPTANCE.append((number, text, True, ""))

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, text, ok, why in sorted(ACCEPTANCE):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {text}"
        terminalreporter.write_line(line + (f"  ({why})" if why else ""))


@pytest.fixture(scope="session")
def V02():
    return GradedSpace.from_even_odd((), ("f1", "f2"))


@pytest.fixture(scope="session")
def S02(V02):
    return SplitSpace.from_names(V02, ["f2"], ["f1"])


@pytest.fixture(scope="session")
def V11():
    return GradedSpace.from_even_odd(("e1",), ("e2",))


@pytest.fixture(scope="session")
def S11w(V11):
    """W = <e2> odd, M = <e1> even."""
    return SplitSpace.from_names(V11, ["e1"], ["e2"])


@pytest.fixture(scope="session")
def S11m(V11):
    """M = <e2> odd, W = <e1> even."""
    return SplitSpace.from_names(V11, ["e2"], ["e1"])


def moduli_02(V):
    p = lambda i, o, c=1: phi(V, i, o, c)
    return {
        "d1": p([1, 1], 1) + p([2, 2], 2),
        "d2": p([1, 1], 1) + p([1, 2], 2),
        "d3": p([1, 1], 1) + p([2, 1], 2),
        "d4": p([1, 1], 1) + p([1, 2], 2) + p([2, 1], 2),
        "d5": p([1, 1], 1),
        "d6": p([1, 1], 2),
    }


def moduli_11(V):
    p = lambda i, o, c=1: phi(V, i, o, c)
    return {
        "d1": p([2, 2], 2) - p([1, 1], 2) - p([1, 2], 1) + p([2, 1], 1),
        "d2": p([2, 2], 2) - p([1, 2], 1),
        "d3": p([2, 2], 2) + p([2, 1], 1),
        "d4": p([2, 2], 2) - p([1, 2], 1) + p([2, 1], 1),
        "d5": p([2, 2], 2),
        "d6": p([1, 1], 2),
    }


@pytest.fixture(scope="session")
def D02(V02):
    return moduli_02(V02)


@pytest.fixture(scope="session")
def D11(V11):
    return moduli_11(V11)
