import pytest


def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if "test_acceptance" not in report.nodeid or report.when != "call":
        return
    name = report.nodeid.split("::")[-1]
    status = "PASS" if report.passed else "FAIL"
    print(f"\n[acceptance] {status} {name} ({report.duration:.1f}s)")


@pytest.fixture
def connectors():
    from chronolex.tokenizer import load_connectors

    return load_connectors()
