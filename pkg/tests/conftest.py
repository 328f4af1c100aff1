import random

import pytest

from bipham.graphs import Graph


@pytest.fixture
def rng():
    return random.Random(12345)


def random_graph(rng, n, p):
    return Graph(
        n,
        [
            (i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if rng.random() < p
        ],
    )


def complete_graph(n):
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])
