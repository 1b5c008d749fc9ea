import pytest

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        _ACCEPTANCE[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        status = "PASS" if _ACCEPTANCE[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")


@pytest.fixture(scope="session")
def six_user():
    from ccmimo.model import NetworkConfig
    from ccmimo.pipeline import build_pipeline_scheme
    return build_pipeline_scheme(NetworkConfig(6, 4, 2, 6, 1), "cyclic")


@pytest.fixture(scope="session")
def three_user_bit():
    from ccmimo.miso import multiserver_bitlevel
    from ccmimo.model import NetworkConfig
    return multiserver_bitlevel(NetworkConfig(3, 2, 1, 3, 1))
