"""Shared fixtures: cached algebras and Stiefel spaces (expensive builds)."""

import os

import pytest
from hypothesis import settings

from go_metric_lab import lie_core, stiefel

settings.register_profile("ci", max_examples=25, deadline=None)
settings.register_profile("dev", max_examples=10, deadline=None)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "ci"))

_ALGEBRAS = {}
_SPACES = {}


def get_un(n: int) -> lie_core.MatrixLieAlgebra:
    if n not in _ALGEBRAS:
        _ALGEBRAS[n] = lie_core.build_un(n)
    return _ALGEBRAS[n]


def get_space(n: int, k: int) -> stiefel.StiefelSpace:
    if (n, k) not in _SPACES:
        _SPACES[(n, k)] = stiefel.build_stiefel(n, k)
    return _SPACES[(n, k)]


@pytest.fixture(scope="session")
def un():
    return get_un


@pytest.fixture(scope="session")
def space():
    return get_space
