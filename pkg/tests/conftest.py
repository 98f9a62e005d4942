import pytest

from toricchow import generators as gen

# acceptance outcomes, filled by test_acceptance via the report hook
ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance" not in report.nodeid or not name.startswith("test_criterion_"):
        return
    n = int(name.split("_")[2])
    doc = report.head_line or name
    status = "PASS" if report.outcome == "passed" else "FAIL"
    prev = ACCEPTANCE.get(n)
    if prev is None or prev[0] == "PASS":
        ACCEPTANCE[n] = (status, doc)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    from test_acceptance import TITLES
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, _ = ACCEPTANCE[n]
        terminalreporter.write_line(f"ACCEPTANCE criterion {n}: {status}  {TITLES[n]}")


@pytest.fixture(scope="session")
def p1():
    return gen.projective_line()


@pytest.fixture(scope="session")
def p2():
    return gen.projective_plane()


@pytest.fixture(scope="session")
def p1xp1():
    return gen.product_of_lines(2)


@pytest.fixture(scope="session")
def x24():
    return gen.hypersimplex(2, 4)


@pytest.fixture(scope="session", params=[0, 1, 2, 3])
def hirz(request):
    return request.param, gen.hirzebruch(request.param)


@pytest.fixture(scope="session")
def complete_fans():
    """A spread of complete fans: smooth, simplicial and neither."""
    return {
        "p2": gen.projective_plane(),
        "p1xp1": gen.product_of_lines(2),
        "f1": gen.hirzebruch(1),
        "f3": gen.hirzebruch(3),
        "p3": gen.projective_space(3),
        "blowup": gen.blown_up_plane(),
        "x24": gen.hypersimplex(2, 4),
        "cube": gen.cube_fan(),
        "cube2": gen.cube_fan(2),
    }
