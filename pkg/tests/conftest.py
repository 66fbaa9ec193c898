import pytest

_ACCEPTANCE: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): exit criterion of the build")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    entry = _ACCEPTANCE.setdefault(number, [title, True, False])
    if report.when == "call":
        entry[2] = True
    if report.failed:
        entry[1] = False


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, passed, ran = _ACCEPTANCE[number]
        status = "PASS" if passed and ran else ("FAIL" if ran or not passed else "SKIP")
        terminalreporter.write_line(f"[{status}] criterion {number:2d}: {title}")
