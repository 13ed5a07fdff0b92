import functools

import pytest

from curvcert import zoo


@functools.lru_cache(maxsize=None)
def _entry(name):
    return zoo.load(name)


@pytest.fixture
def entry():
    """Cached zoo loader (entries are immutable)."""
    return _entry


@pytest.fixture
def ball():
    return _entry("ball")


@pytest.fixture
def half_space():
    return _entry("half_space")


@pytest.fixture
def gaussian_half_space():
    return _entry("gaussian_half_space")
