import pytest

from csinterlace import fixtures
from csinterlace.golay import cached_enumerate_gcps, enumerate_gcps
from csinterlace.interlace import InterlaceConfig


@pytest.fixture(scope="session")
def reference_pairs():
    return fixtures.load_reference_pairs()


@pytest.fixture(scope="session")
def noncoherent_spread():
    return fixtures.load_noncoherent_spread()


@pytest.fixture(scope="session")
def coherent_example():
    return fixtures.load_coherent_example()


@pytest.fixture(scope="session")
def lte_config():
    return InterlaceConfig(n_rb=10, n_sc=12, n_null=108)


@pytest.fixture(scope="session")
def small_libraries():
    """Enumerated pair libraries for lengths 1..6 (cheap, used as seed pools)."""
    return {n: enumerate_gcps(n) for n in range(1, 7)}


@pytest.fixture(scope="session")
def gcp_library_12(tmp_path_factory):
    """The full length-12 library, enumerated once per session and disk-cached."""
    cache = tmp_path_factory.mktemp("gcp-cache")
    return cached_enumerate_gcps(12, cache)
