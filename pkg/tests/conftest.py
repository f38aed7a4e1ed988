import pytest

from dialectic.grammar import core_grammar
from dialectic.stdlib import base_store
from dialectic.tactics import builtin_registry


@pytest.fixture(scope="session")
def store():
    return base_store()


@pytest.fixture(scope="session")
def registry(store):
    return builtin_registry(store)


@pytest.fixture(scope="session")
def core(registry):
    return core_grammar(registry)
