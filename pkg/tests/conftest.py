import pytest

from bergman_cmcd.geometry import validate

REFERENCE = [(0.4, 0.2)]
ANNULUS = [(0, 0.5)]
DEGENERATE = [(0.25, 0.25)]
TWO_DISKS = [(0.4, 0.2), (-0.45, 0.2)]
THREE_REAL = [(0.55, 0.12), (-0.5, 0.15), (0.1, 0.05)]
THREE_SMALL = [(0.5, 0.1), (-0.5, 0.1), (0.5j, 0.1)]


@pytest.fixture(scope="session")
def ref():
    return validate(REFERENCE)


@pytest.fixture(scope="session")
def annulus():
    return validate(ANNULUS)


@pytest.fixture(scope="session")
def degenerate():
    return validate(DEGENERATE)


@pytest.fixture(scope="session")
def two_disks():
    return validate(TWO_DISKS)


@pytest.fixture(scope="session")
def three_real():
    return validate(THREE_REAL)


@pytest.fixture(scope="session")
def three_small():
    return validate(THREE_SMALL)


@pytest.fixture(scope="session")
def ref_family(ref):
    from bergman_cmcd.moebius import enumerate_family
    return enumerate_family(ref, 14, 1e-30)


_ACCEPTANCE: list[str] = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""
    def record(number, ok, detail):
        _ACCEPTANCE.append(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
