import pytest

from supercohom.engine import CohomologyEngine


@pytest.fixture(scope="session")
def engines():
    """Shared engines so expensive caches persist across tests."""
    pool = {}

    def get(spec_str, module="trivial"):
        key = (spec_str, module)
        if key not in pool:
            pool[key] = CohomologyEngine(spec_str, module)
        return pool[key]

    return get
