"""Builders shared by the test modules."""

import random

from arbor.graphs import FiniteGraph, FiniteTree


def random_tree(n: int, rng: random.Random) -> FiniteTree:
    """Uniform attachment: vertex i joins a random earlier vertex."""
    return FiniteTree(n, frozenset((rng.randrange(i), i) for i in range(1, n)))


def random_connected_graph(n: int, p: float, rng: random.Random) -> FiniteGraph:
    edges = {(rng.randrange(i), i) for i in range(1, n)}
    edges |= {(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p}
    return FiniteGraph(n, frozenset(edges))


def path_tree(n: int) -> FiniteTree:
    return FiniteTree(n, frozenset((i, i + 1) for i in range(n - 1)))


def star(leaves: int) -> FiniteTree:
    return FiniteTree(leaves + 1, frozenset((0, i) for i in range(1, leaves + 1)))
