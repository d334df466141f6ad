import pytest

from progvar import PrimeTable


@pytest.fixture(scope="session")
def table():
    """Shared small sieve; unit tests stay within 1e5 (coverage to 1e10)."""
    return PrimeTable(100_000)
