import pytest

from caselift.fixtures import build_aspen_repository


@pytest.fixture(scope="session")
def aspen(tmp_path_factory):
    """The full 40-revision ASPEN repository plus its review log."""
    path = tmp_path_factory.mktemp("aspen-full")
    return build_aspen_repository(path)


@pytest.fixture(scope="session")
def aspen_repo(aspen):
    return aspen[0]


@pytest.fixture(scope="session")
def aspen_log(aspen):
    return aspen[1]


@pytest.fixture()
def aspen21(tmp_path):
    """ASPEN replayed to revision 21: nine open rebuttals, review still open."""
    return build_aspen_repository(tmp_path / "aspen21", upto=21)
