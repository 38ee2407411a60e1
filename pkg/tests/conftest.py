import pytest

RESULTS_KEY = pytest.StashKey[dict]()


@pytest.fixture
def record_criterion(request):
    log = request.config.stash.setdefault(RESULTS_KEY, {})

    def record(number, title, passed, detail):
        log[number] = (title, passed, detail)

    return record


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(RESULTS_KEY, {})
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(log):
        title, passed, detail = log[number]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} {number:>2}. {title}: {detail}")
