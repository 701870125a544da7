import pytest

_criterion_results = []


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(label): acceptance criterion, one summary line each")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    out = yield
    rep = out.get_result()
    if call.when != "call":
        return
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        _criterion_results.append((marker.args[0], rep.passed, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _criterion_results:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, secs in _criterion_results:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status} {label} [{secs:.1f}s]")
