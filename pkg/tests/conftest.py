from __future__ import annotations

import sys

import pytest

from clinistruct.corpus import generate_corpus, load_disease_catalog, variables_by_id
from clinistruct.ingest import SurfaceMatcher
from clinistruct.ontology import build_registry


@pytest.fixture(scope="session")
def catalog():
    return load_disease_catalog()


@pytest.fixture(scope="session")
def registry(catalog):
    return build_registry(catalog)


@pytest.fixture(scope="session")
def matcher(registry):
    return SurfaceMatcher(registry)


@pytest.fixture(scope="session")
def variables(catalog):
    return variables_by_id(catalog)


@pytest.fixture(scope="session")
def small_corpus(catalog):
    """Five patients per disease, seed 11."""
    return generate_corpus(catalog, 5, 11)


def pytest_terminal_summary(terminalreporter):
    test_acceptance = sys.modules.get("tests.test_acceptance")
    if test_acceptance is not None and test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(line)
