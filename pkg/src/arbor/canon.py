"""Canonical forms: rooted (colored) trees by AHU interning, small graphs by
individualization-refinement.
"""

from __future__ import annotations

from typing import Sequence

from .graphs import FiniteGraph, FiniteTree

BLOCK_LIMIT = 12


class TreeForms:
    """Interned canonical ids for the branches of a (vertex-colored) tree.

    ``branch(p, c)`` is the id of the subtree hanging at ``c`` away from its
    neighbour ``p`` (``p = -1`` roots the whole tree at ``c``).  Two branches
    of the same ``TreeForms`` are isomorphic, as rooted colored trees, iff
    their ids coincide.
    """

    def __init__(self, tree: FiniteTree, colors: Sequence | None = None):
        self.tree = tree
        self.colors = tuple(colors) if colors is not None else (0,) * tree.vertex_count
        self._memo: dict[tuple[int, int], int] = {}
        self._intern: dict[tuple, int] = {}

    def children(self, p: int, c: int) -> list[int]:
        return [w for w in self.tree.adjacency[c] if w != p]

    def branch(self, p: int, c: int) -> int:
        memo = self._memo
        if (p, c) in memo:
            return memo[(p, c)]
        stack = [(p, c, False)]
        while stack:
            a, b, ready = stack.pop()
            if (a, b) in memo:
                continue
            kids = self.children(a, b)
            if not ready:
                stack.append((a, b, True))
                stack.extend((b, w, False) for w in kids if (b, w) not in memo)
                continue
            sig = (self.colors[b], tuple(sorted(memo[(b, w)] for w in kids)))
            memo[(a, b)] = self._intern.setdefault(sig, len(self._intern))
        return memo[(p, c)]

    def sorted_children(self, p: int, c: int) -> list[int]:
        return sorted(self.children(p, c), key=lambda w: (self.branch(c, w), w))

    def isomorphism(self, p1: int, c1: int, p2: int, c2: int) -> dict[int, int]:
        """Map the branch at ``c1`` onto the branch at ``c2`` (forms must agree)."""
        if self.branch(p1, c1) != self.branch(p2, c2):
            raise ValueError("branches are not isomorphic")
        out = {}
        stack = [(p1, c1, p2, c2)]
        while stack:
            a1, b1, a2, b2 = stack.pop()
            out[b1] = b2
            for w1, w2 in zip(self.sorted_children(a1, b1), self.sorted_children(a2, b2)):
                stack.append((b1, w1, b2, w2))
        return out


def _refine(adj, cells: list[list[int]]) -> list[list[int]]:
    n = len(adj)
    while True:
        cell_of = [0] * n
        for i, cell in enumerate(cells):
            for v in cell:
                cell_of[v] = i
        new = []
        for i, cell in enumerate(cells):
            if len(cell) == 1:
                new.append(cell)
                continue
            sig = {v: tuple(sorted(cell_of[w] for w in adj[v])) for v in cell}
            for s in sorted(set(sig.values())):
                new.append(sorted(v for v in cell if sig[v] == s))
        if len(new) == len(cells):
            return new
        cells = new


def canonical_labeling(graph: FiniteGraph, partition: Sequence[Sequence[int]] | None = None):
    """Canonical relabelling of a small graph.

    Returns ``(form, labeling)``: ``form`` is the sorted edge tuple under the
    canonical labels and ``labeling[v]`` is the canonical label of ``v``.
    Isomorphic graphs (with corresponding ordered vertex partitions) get equal
    forms.  Search is individualization-refinement with pruning by the
    automorphisms discovered so far.
    """
    n = graph.vertex_count
    adj = graph.adjacency
    cells = [sorted(c) for c in partition] if partition is not None else [list(range(n))]
    if sorted(v for c in cells for v in c) != list(range(n)):
        raise ValueError("partition must cover every vertex exactly once")
    cells = [c for c in cells if c]
    best: list = [None, None]
    autos: list[tuple[int, ...]] = []

    def leaf(cells):
        lab = [0] * n
        for i, cell in enumerate(cells):
            lab[cell[0]] = i
        form = tuple(sorted((min(lab[u], lab[v]), max(lab[u], lab[v])) for u, v in graph.edges))
        if best[0] is None or form < best[0]:
            best[0], best[1] = form, lab
        elif form == best[0]:
            inv = [0] * n
            for v, i in enumerate(best[1]):
                inv[i] = v
            autos.append(tuple(inv[lab[v]] for v in range(n)))

    def search(cells, prefix):
        cells = _refine(adj, cells)
        target = next((i for i, c in enumerate(cells) if len(c) > 1), None)
        if target is None:
            leaf(cells)
            return
        tried: list[int] = []
        for v in cells[target]:
            if tried and _same_orbit(v, tried, prefix, autos, n):
                continue
            tried.append(v)
            rest = [w for w in cells[target] if w != v]
            search(cells[:target] + [[v], rest] + cells[target + 1:], prefix + (v,))

    search(cells, ())
    return best[0], tuple(best[1])


def _same_orbit(v, tried, prefix, autos, n) -> bool:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in autos:
        if all(a[p] == p for p in prefix):
            for x in range(n):
                parent[find(x)] = find(a[x])
    r = find(v)
    return any(find(t) == r for t in tried)


def vertex_orbit_labels(graph: FiniteGraph) -> tuple[tuple, tuple[int, ...]]:
    """Canonical form of ``graph`` and, per vertex, a canonical orbit label.

    Two vertices share a label iff some automorphism maps one to the other;
    labels are the smallest canonical position in the orbit, so they agree
    across isomorphic graphs.
    """
    if graph.vertex_count > BLOCK_LIMIT:
        raise ValueError(f"exact orbit computation limited to {BLOCK_LIMIT} vertices")
    form, lab = canonical_labeling(graph)
    n = graph.vertex_count
    pointed = [canonical_labeling(graph, [[v], [w for w in range(n) if w != v]])[0] for v in range(n)]
    labels = []
    for v in range(n):
        labels.append(min(lab[w] for w in range(n) if pointed[w] == pointed[v]))
    return form, tuple(labels)
