import pytest

from amroc.link.abstraction import default_table_path, load_tables


@pytest.fixture(scope="session")
def ref_tables():
    return load_tables(default_table_path())


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
