import pytest

from orcasim.atomphys import load_species


@pytest.fixture(scope="session")
def cs():
    return load_species("cs")


@pytest.fixture(scope="session")
def rb():
    return load_species("rb87")
