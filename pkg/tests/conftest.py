"""Shared fixtures: paths, canonical metrics, and cached sample corpora."""

import json
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

import cat5
from cat5 import verify as V

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_fixture(name):
    with open(FIXTURES / name) as fh:
        return json.load(fh)


def fixture_space(name):
    return cat5.validate_metric(load_fixture(name)["d"])


@lru_cache(maxsize=None)
def corpus(kind, count, base_seed, n=5):
    """Deterministic list of sample spaces, shared across tests."""
    return tuple(V.random_metric(kind, n, (base_seed, i)) for i in range(count))


@lru_cache(maxsize=None)
def embed_corpus(kind, count, base_seed, n=5):
    """Embedding results for every comparison-passing sample of a corpus."""
    out = []
    for space in corpus(kind, count, base_seed, n):
        if cat5.cat0_comparison_all(space).holds:
            out.append(cat5.cat0_embed(space))
    return tuple(out)


@pytest.fixture(scope="session")
def tripod_extension():
    return fixture_space("tripod_extension.json")


@pytest.fixture(scope="session")
def failing_space():
    return fixture_space("failing_quadruple.json")


@pytest.fixture(scope="session")
def unit_square():
    return fixture_space("unit_square.json")


@pytest.fixture(scope="session")
def octahedron():
    return fixture_space("octahedron.json")


@pytest.fixture(scope="session")
def star4():
    return fixture_space("star4.json")


@pytest.fixture(scope="session")
def v5_embedding():
    """Hand-built signed embedding: unit tetrahedron at time 0, apex below."""
    coords = np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [0.25, 0.25, 0.25, -0.2],
        ]
    )
    return cat5.MinkowskiEmbedding(coords, (1, 1, 1, -1), 3, base_index=3)
