import pytest

from folnerlab import parse_group
from folnerlab.cayley import build_ball


@pytest.fixture(scope="session")
def free2():
    return parse_group("free:2")


@pytest.fixture(scope="session")
def zd1():
    return parse_group("zd:1")


@pytest.fixture(scope="session")
def zd2():
    return parse_group("zd:2")


@pytest.fixture(scope="session")
def fpc23():
    return parse_group("fpc:2,3")


@pytest.fixture(scope="session")
def tree_ball_12(free2):
    # ~1.06M vertices, built once per session
    return build_ball(free2, free2.standard_symmetric(), 12)


@pytest.fixture(scope="session")
def tree_ball_8(free2):
    return build_ball(free2, free2.standard_symmetric(), 8)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def acceptance():
    def record(number: int, ok: bool, detail: str) -> bool:
        ACCEPTANCE[number] = (bool(ok), detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
