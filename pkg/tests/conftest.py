import pytest

from cmtorus.families import FamilySpec, generate_family


@pytest.fixture(scope="session")
def odd_main_p3():
    return generate_family(FamilySpec(3, 32, "odd_p_main", count=2))


@pytest.fixture(scope="session")
def two_adic_unram():
    return generate_family(FamilySpec(2, 8, "two_adic_unramified", count=1))


_ACCEPTANCE: dict[int, str] = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_acceptance_"):
        return
    n = int(name.split("_")[2])
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE[n] = "PASS" if report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    import sys

    module = sys.modules.get("test_acceptance")
    criteria = getattr(module, "CRITERIA", {})
    details = getattr(module, "_DETAILS", {})
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        title = criteria.get(n, ("",))[0]
        extra = f" ({details[n]})" if n in details else ""
        terminalreporter.write_line(f"ACCEPTANCE {n} {_ACCEPTANCE[n]}: {title}{extra}")
