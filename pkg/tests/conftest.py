import os

import pytest

from anglekit.formats import parse_tri

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)


def fixture_text(name: str) -> str:
    with open(fixture_path(name)) as fh:
        return fh.read()


def load_tri(name: str):
    return parse_tri(fixture_text(name))


@pytest.fixture
def fig8():
    return load_tri("fig8.tri")


@pytest.fixture
def gieseking():
    return load_tri("gieseking.tri")


@pytest.fixture
def valence1():
    return load_tri("valence1.tri")
