import pytest

_CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Attach a one-line measurement to an acceptance test's report."""

    def note(text):
        request.node.user_properties.append(("measured", text))

    return note


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or report.outcome != "passed":
        measured = dict(report.user_properties).get("measured", "")
        prev = _CRITERIA.get(name)
        if prev is None or prev[0] == "PASS":
            _CRITERIA[name] = ("PASS" if report.outcome == "passed" else "FAIL", measured)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA):
        status, measured = _CRITERIA[name]
        line = f"{status}  {name.removeprefix('test_')}"
        if measured:
            line += f"  [{measured}]"
        terminalreporter.write_line(line)
