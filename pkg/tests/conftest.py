import pytest

from fsmreq.fixtures import load_model, load_requirement
from fsmreq.requirements import build_m1, build_m1_prime, build_m2


@pytest.fixture(scope="session")
def M():
    return load_model("example_m.csv")


@pytest.fixture(scope="session")
def S(M):
    return load_model("example_s.csv", like=M)


@pytest.fixture(scope="session")
def S_prime(M):
    return load_model("example_s_prime.csv", like=M)


@pytest.fixture(scope="session")
def R(M):
    return load_requirement("example_r.req", M)


@pytest.fixture(scope="session")
def m1p(M, R):
    return build_m1_prime(M, R)


@pytest.fixture(scope="session")
def classmap(M, R):
    return build_m2(build_m1(M, R))


@pytest.fixture(scope="session")
def fsb():
    return load_model("fsbrts.csv")


@pytest.fixture(scope="session")
def R1(fsb):
    return load_requirement("fsbrts_r1.req", fsb)


@pytest.fixture(scope="session")
def R2(fsb):
    return load_requirement("fsbrts_r2.req", fsb)


def tr(m, text):
    """Input trace from dotted names."""
    from fsmreq.fsm import parse_trace

    return parse_trace(m.inputs, text)


def outs(m, ys):
    return ".".join(m.outputs[y] for y in ys)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
