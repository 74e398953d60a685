"""Finite graphs, trees and the metric machinery used throughout the package.

Vertex ids are dense non-negative integers and every iteration runs in
ascending id order, so all results are deterministic.  Values are immutable
once constructed; derived data (adjacency lists, BFS distance tables) is
cached lazily on the instance.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

__all__ = [
    "FiniteGraph",
    "FiniteTree",
    "MultiGraph",
    "MultiEdge",
    "TruncatedTree",
    "HalfTree",
    "BlockCutTree",
    "HorocyclePartition",
    "tree_geodesic",
    "project_to_path",
    "half_tree_vertices",
    "block_cut_tree",
    "horocycle_partition",
    "is_path",
    "graph_to_dot",
    "block_cut_tree_to_dot",
    "horocycles_to_dot",
]


def edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class FiniteGraph:
    vertex_count: int
    edges: frozenset

    def __post_init__(self):
        if self.vertex_count < 0:
            raise ValueError("vertex_count must be non-negative")
        normalized = set()
        for e in self.edges:
            u, v = e
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ValueError(f"edge {e} has an endpoint outside 0..{self.vertex_count - 1}")
            normalized.add(edge_key(u, v))
        object.__setattr__(self, "edges", frozenset(normalized))

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[Sequence[int]]):
        pairs = [tuple(e) for e in edges]
        keys = [edge_key(*p) for p in pairs]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate edge")
        return cls(vertex_count, frozenset(keys))

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def sorted_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.edges))

    def neighbors(self, v: int) -> tuple[int, ...]:
        self._check_vertex(v)
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def has_edge(self, u: int, v: int) -> bool:
        return edge_key(u, v) in self.edges

    def _check_vertex(self, v: int):
        if not (isinstance(v, int) and 0 <= v < self.vertex_count):
            raise KeyError(f"unknown vertex {v!r}")

    def bfs_distances(self, source: int, removed: frozenset | set = frozenset()) -> list[int]:
        """Distances from ``source``; -1 marks unreachable (or removed) vertices."""
        self._check_vertex(source)
        dist = [-1] * self.vertex_count
        if source in removed:
            return dist
        dist[source] = 0
        queue = deque([source])
        adj = self.adjacency
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if dist[y] < 0 and y not in removed:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        return dist

    def components(self, removed: frozenset | set = frozenset()) -> list[list[int]]:
        seen = set(removed)
        comps = []
        for s in range(self.vertex_count):
            if s in seen:
                continue
            d = self.bfs_distances(s, removed)
            comp = [v for v in range(self.vertex_count) if d[v] >= 0]
            seen.update(comp)
            comps.append(comp)
        return comps

    def is_connected(self) -> bool:
        if self.vertex_count == 0:
            return True
        return all(d >= 0 for d in self.bfs_distances(0))

    def induced(self, vertices: Iterable[int]) -> tuple["FiniteGraph", list[int]]:
        """Induced subgraph relabelled to 0..k-1, plus the list old ids by new id."""
        order = sorted(set(vertices))
        index = {v: i for i, v in enumerate(order)}
        sub = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return FiniteGraph(len(order), frozenset(sub)), order

    def to_dict(self) -> dict:
        return {"vertex_count": self.vertex_count, "edges": [list(e) for e in self.sorted_edges]}


class FiniteTree(FiniteGraph):
    """A connected acyclic graph; verified on construction."""

    def __post_init__(self):
        super().__post_init__()
        if self.vertex_count == 0:
            raise ValueError("a tree needs at least one vertex")
        if len(self.edges) != self.vertex_count - 1 or not self.is_connected():
            raise ValueError("not a tree: must be connected with |E| = |V| - 1")

    @classmethod
    def from_graph(cls, graph: FiniteGraph) -> "FiniteTree":
        return cls(graph.vertex_count, graph.edges)

    @cached_property
    def _distance_cache(self) -> dict[int, list[int]]:
        return {}

    def distances_from(self, v: int) -> list[int]:
        cache = self._distance_cache
        if v not in cache:
            cache[v] = self.bfs_distances(v)
        return cache[v]

    def distance(self, u: int, v: int) -> int:
        self._check_vertex(v)
        return self.distances_from(u)[v]

    def leaves(self) -> list[int]:
        return [v for v in range(self.vertex_count) if len(self.adjacency[v]) <= 1]

    def centers(self) -> list[int]:
        """The one or two central vertices (found by peeling leaves)."""
        n = self.vertex_count
        if n <= 2:
            return list(range(n))
        deg = [len(a) for a in self.adjacency]
        layer = [v for v in range(n) if deg[v] == 1]
        remaining = n
        while remaining > 2:
            remaining -= len(layer)
            nxt = []
            for v in layer:
                for w in self.adjacency[v]:
                    deg[w] -= 1
                    if deg[w] == 1:
                        nxt.append(w)
            layer = nxt
        return sorted(layer)

    def eccentricity(self, v: int) -> int:
        return max(self.distances_from(v))


@dataclass(frozen=True)
class MultiEdge:
    id: int
    ends: tuple[int, ...]  # one entry for a loop, two otherwise

    @property
    def is_loop(self) -> bool:
        return len(self.ends) == 1


@dataclass(frozen=True)
class MultiGraph:
    vertex_count: int
    edges: tuple[MultiEdge, ...]

    def __post_init__(self):
        for e in self.edges:
            if len(e.ends) not in (1, 2) or len(set(e.ends)) != len(e.ends):
                raise ValueError(f"bad endpoint set for edge {e.id}")
            if any(not (0 <= x < self.vertex_count) for x in e.ends):
                raise ValueError(f"edge {e.id} has an endpoint outside the vertex range")

    def loops(self) -> list[MultiEdge]:
        return [e for e in self.edges if e.is_loop]

    def is_connected(self) -> bool:
        if self.vertex_count == 0:
            return True
        parent = list(range(self.vertex_count))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.edges:
            if len(e.ends) == 2:
                parent[find(e.ends[0])] = find(e.ends[1])
        return len({find(x) for x in range(self.vertex_count)}) == 1

    def betti_number(self) -> int:
        if not self.is_connected():
            raise ValueError("betti number requested for a disconnected multigraph")
        return len(self.edges) - self.vertex_count + 1

    def to_dict(self) -> dict:
        return {
            "vertex_count": self.vertex_count,
            "edges": [{"id": e.id, "ends": list(e.ends)} for e in self.edges],
        }


@dataclass(frozen=True)
class TruncatedTree:
    """Ball of radius ``radius`` about ``center`` in a (possibly infinite) tree.

    ``interior_degree`` is the degree every non-boundary vertex has in the
    model tree; ``None`` skips that check.  ``labels`` optionally carries the
    address of each vertex in the model (a reduced word, an integer on a
    line, ...).  ``truncated=False`` marks a window that *is* the whole tree,
    so its boundary is genuine rather than an artefact of the cut.
    """

    tree: FiniteTree
    center: int
    radius: int
    interior_degree: int | None = None
    labels: tuple | None = None
    truncated: bool = True
    boundary: frozenset = field(init=False)

    def __post_init__(self):
        dist = self.tree.distances_from(self.center)
        if max(dist) > self.radius:
            raise ValueError("tree reaches beyond the stated radius")
        object.__setattr__(self, "boundary", frozenset(v for v, d in enumerate(dist) if d == self.radius))
        if self.interior_degree is not None:
            for v in range(self.tree.vertex_count):
                if v not in self.boundary and self.tree.degree(v) != self.interior_degree:
                    raise ValueError(
                        f"interior vertex {v} has degree {self.tree.degree(v)}, expected {self.interior_degree}"
                    )
        if self.labels is not None and len(self.labels) != self.tree.vertex_count:
            raise ValueError("one label per vertex required")

    @classmethod
    def whole(cls, tree: FiniteTree) -> "TruncatedTree":
        c = tree.centers()[0]
        return cls(tree, c, tree.eccentricity(c), truncated=False)

    @property
    def vertex_count(self) -> int:
        return self.tree.vertex_count

    @cached_property
    def depth(self) -> tuple[int, ...]:
        return tuple(self.tree.distances_from(self.center))

    @cached_property
    def interior(self) -> frozenset:
        if not self.truncated:
            return frozenset(v for v in range(self.vertex_count) if self.tree.degree(v) > 1 or self.vertex_count == 1)
        return frozenset(v for v in range(self.vertex_count) if v not in self.boundary)

    def interior_edges(self) -> list[tuple[int, int]]:
        inner = self.interior
        return [e for e in self.tree.sorted_edges if e[0] in inner and e[1] in inner]

    def ball(self, r: int) -> frozenset:
        return frozenset(v for v, d in enumerate(self.depth) if d <= r)

    @cached_property
    def label_index(self) -> dict:
        if self.labels is None:
            raise ValueError("window carries no model labels")
        return {lab: i for i, lab in enumerate(self.labels)}

    def boundary_directions(self) -> list[tuple[int, ...]]:
        """Geodesics from the center to each boundary vertex.

        These are the only finite-scale stand-ins for ends that the window
        can offer.
        """
        return [tuple(tree_geodesic(self.tree, self.center, b)) for b in sorted(self.boundary)]


@dataclass(frozen=True)
class HalfTree:
    edge: tuple[int, int]
    side: int

    def __post_init__(self):
        u, v = self.edge
        object.__setattr__(self, "edge", edge_key(u, v))
        if self.side not in self.edge:
            raise ValueError("side must be an endpoint of the edge")

    @property
    def other(self) -> int:
        u, v = self.edge
        return v if self.side == u else u

    def complement(self) -> "HalfTree":
        return HalfTree(self.edge, self.other)


def _as_tree(tree) -> FiniteTree:
    return tree.tree if isinstance(tree, TruncatedTree) else tree


def is_path(graph: FiniteGraph, seq: Sequence[int]) -> bool:
    if len(seq) == 0 or len(set(seq)) != len(seq):
        return False
    try:
        for v in seq:
            graph._check_vertex(v)
    except KeyError:
        return False
    return all(graph.has_edge(a, b) for a, b in zip(seq, seq[1:]))


def tree_geodesic(tree: FiniteTree, u: int, v: int) -> list[int]:
    tree = _as_tree(tree)
    tree._check_vertex(u)
    dv = tree.distances_from(v)
    path = [u]
    x = u
    while x != v:
        x = next(w for w in tree.adjacency[x] if dv[w] == dv[x] - 1)
        path.append(x)
    return path


def project_to_path(tree: FiniteTree, path: Sequence[int], x: int) -> int:
    tree = _as_tree(tree)
    if not is_path(tree, path):
        raise ValueError("not a path in the tree")
    dx = tree.distances_from(x)
    best = min(dx[p] for p in path)
    hits = [p for p in path if dx[p] == best]
    assert len(hits) == 1, "projection onto a path in a tree must be unique"
    return hits[0]


def half_tree_vertices(tree: FiniteTree, h: HalfTree) -> frozenset:
    tree = _as_tree(tree)
    u, v = h.edge
    if not tree.has_edge(u, v):
        raise ValueError(f"{h.edge} is not an edge of the tree")
    d = tree.bfs_distances(h.side, removed={h.other})
    return frozenset(i for i, x in enumerate(d) if x >= 0)


@dataclass(frozen=True)
class BlockCutTree:
    blocks: tuple[tuple[int, ...], ...]
    cut_vertices: tuple[int, ...]
    incidences: tuple[tuple[int, int], ...]  # (cutvertex, block index)

    def as_tree(self) -> FiniteTree:
        """The incidence structure as a tree: blocks first, then cutvertices."""
        nb = len(self.blocks)
        pos = {c: nb + i for i, c in enumerate(self.cut_vertices)}
        return FiniteTree(nb + len(self.cut_vertices), frozenset(edge_key(pos[c], b) for c, b in self.incidences))

    def blocks_containing(self, v: int) -> list[int]:
        return [i for i, b in enumerate(self.blocks) if v in b]


def block_cut_tree(graph: FiniteGraph) -> BlockCutTree:
    """Blocks and cutvertices by the iterative lowpoint DFS."""
    n = graph.vertex_count
    if n == 0 or not graph.is_connected():
        raise ValueError("block-cut tree requires a connected, non-empty graph")
    if n == 1:
        return BlockCutTree(((0,),), (), ())
    adj = graph.adjacency
    disc = [-1] * n
    low = [0] * n
    is_cut = [False] * n
    blocks: list[tuple[int, ...]] = []
    edge_stack: list[tuple[int, int]] = []
    disc[0] = low[0] = 0
    clock = 1
    root_children = 0
    stack = [(0, -1, iter(adj[0]))]
    while stack:
        v, p, it = stack[-1]
        descended = False
        for w in it:
            if disc[w] == -1:
                edge_stack.append((v, w))
                disc[w] = low[w] = clock
                clock += 1
                stack.append((w, v, iter(adj[w])))
                descended = True
                break
            if w != p and disc[w] < disc[v]:
                edge_stack.append((v, w))
                low[v] = min(low[v], disc[w])
        if descended:
            continue
        stack.pop()
        if not stack:
            break
        u = stack[-1][0]
        low[u] = min(low[u], low[v])
        if u == 0:
            root_children += 1
        if low[v] >= disc[u]:
            if u != 0:
                is_cut[u] = True
            comp = set()
            while True:
                a, b = edge_stack.pop()
                comp.update((a, b))
                if (a, b) == (u, v):
                    break
            blocks.append(tuple(sorted(comp)))
    if root_children > 1:
        is_cut[0] = True
    blocks.sort()
    cuts = tuple(v for v in range(n) if is_cut[v])
    inc = tuple((c, i) for c in cuts for i, b in enumerate(blocks) if c in b)
    return BlockCutTree(tuple(blocks), cuts, inc)


@dataclass(frozen=True)
class HorocyclePartition:
    ray: tuple[int, ...]
    level: tuple[int, ...]  # level (Busemann value) of each vertex

    def classes(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {}
        for v, b in enumerate(self.level):
            out.setdefault(b, []).append(v)
        return {b: tuple(out[b]) for b in sorted(out)}

    def sizes(self) -> list[int]:
        return [len(c) for c in self.classes().values()]


def horocycle_partition(tree: FiniteTree, ray: Sequence[int]) -> HorocyclePartition:
    """Level sets of b(u) = d(u, p_u) - index(p_u), p_u the projection of u onto the ray."""
    tree = _as_tree(tree)
    if not is_path(tree, ray):
        raise ValueError("ray must be a path in the tree")
    n = tree.vertex_count
    index = [-1] * n
    dist = [-1] * n
    queue = deque()
    for i, r in enumerate(ray):
        index[r], dist[r] = i, 0
        queue.append(r)
    while queue:
        x = queue.popleft()
        for y in tree.adjacency[x]:
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                index[y] = index[x]
                queue.append(y)
    return HorocyclePartition(tuple(ray), tuple(dist[v] - index[v] for v in range(n)))


def graph_to_dot(graph: FiniteGraph, name: str = "X", vertex_attrs: dict | None = None) -> str:
    lines = [f"graph {name} {{"]
    for v in range(graph.vertex_count):
        attrs = (vertex_attrs or {}).get(v)
        if attrs:
            body = ", ".join(f'{k}="{val}"' for k, val in sorted(attrs.items()))
            lines.append(f"  {v} [{body}];")
        else:
            lines.append(f"  {v};")
    for u, v in graph.sorted_edges:
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def block_cut_tree_to_dot(bct: BlockCutTree, name: str = "TX") -> str:
    lines = [f"graph {name} {{"]
    for i, b in enumerate(bct.blocks):
        lines.append(f'  B{i} [shape=box, label="{{{",".join(map(str, b))}}}"];')
    for c in bct.cut_vertices:
        lines.append(f'  c{c} [shape=circle, label="{c}"];')
    for c, i in bct.incidences:
        lines.append(f"  c{c} -- B{i};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def horocycles_to_dot(tree: FiniteTree, part: HorocyclePartition, name: str = "T") -> str:
    attrs = {v: {"label": f"{v}:{b}"} for v, b in enumerate(part.level)}
    return graph_to_dot(_as_tree(tree), name, attrs)
