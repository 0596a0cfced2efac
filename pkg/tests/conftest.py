from __future__ import annotations

import pytest

from tonalink.corpusio import bundled_corpus_path, ingest, process_corpus
from tonalink.prondict import bundled_dictionary
from tonalink.romanise import bundled_hkg_table

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def d():
    return bundled_dictionary()


@pytest.fixture(scope="session")
def table():
    return bundled_hkg_table()


@pytest.fixture(scope="session")
def corpus(d, table):
    return process_corpus(ingest(bundled_corpus_path()), d, table)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
