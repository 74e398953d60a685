"""Primitivity obstructions for groups acting on trees, stabilizer chains
along translation axes, Jung-Watkins block counts, and the search for
orbital graphs of connectivity one.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .canon import BLOCK_LIMIT, vertex_orbit_labels
from .graphs import BlockCutTree, FiniteGraph, FiniteTree, TruncatedTree, block_cut_tree, tree_geodesic
from .perm import ENUMERATION_CAP, PermGroup, induced_action, is_primitive, pair_orbit
from .trees import PartialAutomorphism, classify


class Inadmissible(ValueError):
    """The two-point stabilizers required by the distance lemma differ."""


# ---------------------------------------------------------------------------
# the distance lemma for <G_x, G_y>


@dataclass
class SimonInstance:
    tree: FiniteTree
    group: PermGroup
    x: int
    y: int
    z: int

    def __post_init__(self):
        path = tree_geodesic(self.tree, self.x, self.y)
        if self.z not in path[1:-1]:
            raise ValueError("z must lie strictly between x and y")
        if self.tree.distance(self.x, self.z) > self.tree.distance(self.z, self.y):
            raise ValueError("need d(x, z) <= d(z, y); swap x and y")
        if self.group.degree != self.tree.vertex_count:
            raise ValueError("group domain does not match the tree")

    @property
    def admissible(self) -> bool:
        gxz = self.group.pointwise_stabilizer([self.x, self.z])
        gyz = self.group.pointwise_stabilizer([self.y, self.z])
        return gxz.same_group(gyz)

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "z": self.z, "admissible": self.admissible}


@dataclass
class SimonReport:
    verified: bool
    violations: list
    group_order: int
    checked: str  # "elements" | "orbit"

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def simon_inequality_check(inst: SimonInstance, limit: int = ENUMERATION_CAP) -> SimonReport:
    """Every ``h`` in ``<G_x, G_y>`` fixes ``y`` or moves it further than ``d(x, y)``.

    Small groups are enumerated element by element; larger ones are checked
    on the orbit of ``y``, which carries exactly the same information since
    the condition only involves ``h(y)``.
    """
    if not inst.admissible:
        raise Inadmissible(f"stabilizers of {{x, z}} and {{y, z}} differ for ({inst.x}, {inst.y}, {inst.z})")
    g = inst.group
    h = g.pointwise_stabilizer([inst.x]).join(g.pointwise_stabilizer([inst.y]))
    k = inst.tree.distance(inst.x, inst.y)
    y = inst.y
    dist = inst.tree.distances_from(y)
    violations = []
    if h.order() <= limit:
        for elem in h.elements(limit):
            if elem[y] != y and dist[elem[y]] <= k:
                violations.append({"element": list(elem), "image": elem[y], "distance": dist[elem[y]]})
        checked = "elements"
    else:
        for p in h.orbit(y):
            if p != y and dist[p] <= k:
                violations.append({"image": p, "distance": dist[p]})
        checked = "orbit"
    return SimonReport(not violations, violations, h.order(), checked)


def is_invariant(group: PermGroup, points: Iterable[int]) -> bool:
    pts = set(points)
    return all(g[p] in pts for g in group.generators for p in pts)


@dataclass
class ObstructionReport:
    found: tuple | None
    conclusion: str
    cross_check: str | None = None
    scanned: int = 0

    def to_dict(self) -> dict:
        return {
            "found": list(self.found) if self.found else None,
            "conclusion": self.conclusion,
            "cross_check": self.cross_check,
            "scanned": self.scanned,
        }


def _triples(tree: FiniteTree, V1: Sequence[int], x: int):
    for y in V1:
        if y <= x:
            continue
        for z in sorted(tree_geodesic(tree, x, y)[1:-1]):
            yield x, y, z


def primitivity_obstruction_search(
    tree: FiniteTree, group: PermGroup, V1: Iterable[int], offset: int = 0, workers: int = 1
) -> ObstructionReport:
    """First triple ``x < y`` in ``V1`` with ``z`` strictly between and ``G_{x,z} = G_{y,z}``.

    Triples are scanned lexicographically by ``(x, y, z)``, skipping the first
    ``offset``.  A hit with ``d(x, y) >= 2`` rules out a primitive action on
    ``V1``; that conclusion is cross-checked against the block-system test
    on the induced action.
    """
    V1 = sorted(set(V1))
    if not is_invariant(group, V1):
        raise ValueError("V1 is not invariant under the group")
    cache: dict = {}

    def stab(a, b):
        key = (a, b)
        if key not in cache:
            cache[key] = group.pointwise_stabilizer([a, b])
        return cache[key]

    def scan_from(x):
        out = []
        for t in _triples(tree, V1, x):
            a, b, z = t
            out.append((t, stab(a, z).same_group(stab(b, z))))
        return out

    xs = list(V1)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(scan_from, xs))
    else:
        results = None
    scanned = 0
    found = None
    for i, x in enumerate(xs):
        rows = results[i] if results is not None else scan_from(x)
        for t, ok in rows:
            scanned += 1
            if scanned <= offset:
                continue
            if ok and tree.distance(t[0], t[1]) >= 2:
                found = t
                break
        if found:
            break
    if found is None:
        return ObstructionReport(None, "no obstruction found at this scale", scanned=scanned)
    x, y, z = found
    if tree.distance(x, z) > tree.distance(z, y):
        found = (y, x, z)
    induced, _ = induced_action(group, V1)
    verdict = is_primitive(induced).verdict
    if verdict == "primitive":
        gx = group.pointwise_stabilizer([found[0]])
        gy = group.pointwise_stabilizer([found[1]])
        if not gx.same_group(gy):
            raise AssertionError(f"obstruction {found} found but the action on V1 is primitive")
        conclusion = "degenerate: equal point stabilizers, the obstruction does not apply"
    else:
        conclusion = "not primitive on V1"
    return ObstructionReport(found, conclusion, verdict, scanned)


# ---------------------------------------------------------------------------
# stabilizer chains along a translation axis


@dataclass
class AxisChainReport:
    axis: tuple  # u_j for j = lo..hi, as (j, vertex)
    forward: list  # (j, |G(0, j)|)
    backward: list  # (j, |G(j, m)|)
    m: int | None
    n: int | None
    triple: tuple | None
    triple_admissible: bool | None
    status: str  # "ok" | "degenerate" | "inconclusive"
    line_fixator_matches: bool | None = None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _stable_from(orders: list[tuple[int, int]]) -> int | None:
    """Index from which the order sequence is constant to the end (with one confirming step)."""
    if len(orders) < 2:
        return None
    last = orders[-1][1]
    i = len(orders) - 1
    while i > 0 and orders[i - 1][1] == last:
        i -= 1
    if i >= len(orders) - 1:
        return None
    return orders[i][0]


def stabilizer_chain_along_axis(tree, group: PermGroup, t) -> AxisChainReport:
    """The chains ``G(0) >= G(0,1) >= ...`` and ``G(0,m) >= G(-1,m) >= ...``.

    ``u_j = t^j(u_0)`` with ``u_0`` the axis vertex nearest the window
    center.  ``m`` is where the forward chain stops shrinking and ``n``
    where the backward chain does; both need at least one confirming step
    inside the window, otherwise the result is inconclusive.  The triple
    ``(u_n, u_m, u_{2m-n})`` is then checked for equal two-point stabilizers.
    """
    host = tree if isinstance(tree, TruncatedTree) else TruncatedTree.whole(tree)
    cls = classify(t)
    if cls.kind != "translation":
        raise ValueError(f"t is {cls.kind}, not a translation")
    p = t.to_partial()
    if p.is_total and not group.contains(p.images):
        raise ValueError("t is not in the group")
    depth = host.depth
    u0 = min(cls.axis, key=lambda v: (depth[v], v))
    inv = p.inverse()
    us = {0: u0}
    j, v = 0, u0
    while p.images[v] >= 0:
        j, v = j + 1, p.images[v]
        us[j] = v
    j, v = 0, u0
    while inv.images[v] >= 0:
        j, v = j - 1, inv.images[v]
        us[j] = v
    lo, hi = min(us), max(us)
    axis = tuple((j, us[j]) for j in range(lo, hi + 1))

    def order(i, k):
        return group.pointwise_stabilizer([us[i], us[k]]).order()

    forward = [(j, order(0, j)) for j in range(0, hi + 1)]
    m = _stable_from(forward)
    if m is None:
        return AxisChainReport(axis, forward, [], None, None, None, None, "inconclusive")
    backward = [(j, order(j, m)) for j in range(0, lo - 1, -1)]
    n = _stable_from(backward)
    if n is None:
        return AxisChainReport(axis, forward, backward, m, None, None, None, "inconclusive")
    line_fix = group.pointwise_stabilizer(list(us.values())).order()
    matches = line_fix == order(n, m)
    if m == n:
        return AxisChainReport(axis, forward, backward, m, n, None, None, "degenerate", matches)
    top = 2 * m - n
    triple = (us[n], us[m], us.get(top))
    admissible = None
    status = "ok"
    if top in us:
        gxz = group.pointwise_stabilizer([us[n], us[m]])
        gyz = group.pointwise_stabilizer([us[top], us[m]])
        admissible = gxz.same_group(gyz)
    else:
        status = "inconclusive"
    return AxisChainReport(axis, forward, backward, m, n, triple, admissible, status, matches)


# ---------------------------------------------------------------------------
# Jung-Watkins counts


@dataclass
class JWReport:
    counts: dict  # vertex -> sorted ((block type, orbit label), multiplicity)
    block_types: list  # canonical forms, indexed by type id
    constant_on_interior: bool

    def to_dict(self) -> dict:
        return {
            "counts": {str(v): [[list(k), c] for k, c in cs] for v, cs in self.counts.items()},
            "block_types": [[list(e) for e in form] for form in self.block_types],
            "constant_on_interior": self.constant_on_interior,
        }


def jung_watkins_counts(graph: FiniteGraph, interior: Iterable[int]) -> JWReport:
    """Per vertex, how many blocks of each isomorphism type contain it, and in which orbit."""
    bct = block_cut_tree(graph)
    if not bct.cut_vertices:
        raise ValueError("graph has no cutvertex")
    labelled = []
    for block in bct.blocks:
        if len(block) > BLOCK_LIMIT:
            raise ValueError(f"block with {len(block)} vertices exceeds the exact limit {BLOCK_LIMIT}")
        sub, old = graph.induced(block)
        form, labels = vertex_orbit_labels(sub)
        labelled.append((form, dict(zip(old, labels))))
    types = sorted({form for form, _ in labelled})
    type_id = {f: i for i, f in enumerate(types)}
    counts = {}
    for v in sorted(set(interior)):
        c = Counter()
        for b in bct.blocks_containing(v):
            form, labels = labelled[b]
            c[(type_id[form], labels[v])] += 1
        counts[v] = tuple(sorted(c.items()))
    constant = len(set(counts.values())) <= 1
    return JWReport(counts, types, constant)


# ---------------------------------------------------------------------------
# orbital graphs of connectivity one


@dataclass
class OrbitalSearchReport:
    pair: tuple | None
    orbital: FiniteGraph | None
    block_cut: BlockCutTree | None
    tried: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair) if self.pair else None,
            "orbital_edges": [list(e) for e in self.orbital.sorted_edges] if self.orbital else None,
            "cut_vertices": list(self.block_cut.cut_vertices) if self.block_cut else None,
            "tried": [{"pair": list(p), "connected": c, "cutvertex": k} for p, c, k in self.tried],
        }


def partial_pair_orbit(maps: Sequence[Sequence[int]], x: int, y: int) -> set[tuple[int, int]]:
    """Orbit of ``{x, y}`` under partial maps (and their inverses), applied where defined."""
    tables = [list(m) for m in maps]
    for m in list(tables):
        inv = [-1] * len(m)
        for a, b in enumerate(m):
            if b >= 0:
                inv[b] = a
        tables.append(inv)
    start = (min(x, y), max(x, y))
    seen = {start}
    queue = [start]
    for a, b in queue:
        for m in tables:
            ia, ib = m[a], m[b]
            if ia >= 0 and ib >= 0:
                e = (min(ia, ib), max(ia, ib))
                if e not in seen:
                    seen.add(e)
                    queue.append(e)
    return seen


def connectivity_one_orbital_search(group, domain_graph: FiniteGraph, base: int = 0) -> OrbitalSearchReport:
    """First orbital graph ``G{base, y}`` that is connected and has a cutvertex.

    ``group`` is a :class:`PermGroup` or a list of partial image tables
    (``-1`` where undefined) acting on a window.  For a permutation group one
    ``y`` per suborbit of ``base`` is tried; for partial maps every ``y`` whose
    pair is not already covered, in increasing order.
    """
    n = domain_graph.vertex_count
    if isinstance(group, PermGroup):
        if group.degree != n:
            raise ValueError("group domain does not match the graph")
        reps = [orb[0] for orb in group.pointwise_stabilizer([base]).orbits() if orb[0] != base]

        def orbit(y):
            return pair_orbit(group, base, y)
    else:
        maps = [tuple(m) for m in group]
        if any(len(m) != n for m in maps):
            raise ValueError("map length does not match the graph")
        reps = [y for y in range(n) if y != base]

        def orbit(y):
            return partial_pair_orbit(maps, base, y)

    covered: set = set()
    tried = []
    for y in sorted(reps):
        pair = (min(base, y), max(base, y))
        if pair in covered:
            continue
        edges = orbit(y)
        covered |= edges
        graph = FiniteGraph(n, frozenset(edges))
        connected = graph.is_connected()
        bct = block_cut_tree(graph) if connected else None
        has_cut = bool(bct and bct.cut_vertices)
        tried.append(((base, y), connected, has_cut))
        if has_cut:
            return OrbitalSearchReport((base, y), graph, bct, tried)
    return OrbitalSearchReport(None, None, None, tried)


# ---------------------------------------------------------------------------
# the tree of triangles


@dataclass
class TriangleWindow:
    """Ball in the tree of triangles, modelled as the Cayley graph of Z/3 * Z/3.

    Vertices are reduced words of letters ``(t, p)`` (factor ``t`` in
    {0, 1}, power ``p`` in {1, 2}) with alternating factors.  Each vertex
    lies in one triangle per factor.  ``generators`` are partial image
    tables: left multiplication by each factor's generator, the factor swap
    and the inversion in factor 0.
    """

    graph: FiniteGraph
    words: tuple
    radius: int
    generators: list

    @property
    def interior(self) -> list[int]:
        return [i for i, w in enumerate(self.words) if len(w) < self.radius]


def _tri_mul(a: tuple, b: tuple) -> tuple:
    out = list(a)
    for t, p in b:
        if out and out[-1][0] == t:
            q = (out[-1][1] + p) % 3
            out.pop()
            if q:
                out.append((t, q))
        else:
            out.append((t, p))
    return tuple(out)


def tree_of_triangles(radius: int) -> TriangleWindow:
    words = [()]
    frontier = [()]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for t in (0, 1):
                if w and w[-1][0] == t:
                    continue
                for p in (1, 2):
                    nxt.append(w + ((t, p),))
        words.extend(nxt)
        frontier = nxt
    index = {w: i for i, w in enumerate(words)}
    edges = set()
    for i, w in enumerate(words):
        for t in (0, 1):
            for p in (1, 2):
                j = index.get(_tri_mul(w, ((t, p),)))
                if j is not None:
                    edges.add((min(i, j), max(i, j)))
    graph = FiniteGraph(len(words), frozenset(edges))

    def table(f):
        return tuple(index.get(f(w), -1) for w in words)

    gens = [
        table(lambda w: _tri_mul(((0, 1),), w)),
        table(lambda w: _tri_mul(((1, 1),), w)),
        table(lambda w: tuple((1 - t, p) for t, p in w)),
        table(lambda w: tuple((t, 3 - p if t == 0 else p) for t, p in w)),
    ]
    return TriangleWindow(graph, tuple(words), radius, gens)


def caterpillar_window(radius: int, legs: int = 2):
    """Spine ``-radius..radius`` with ``legs`` leaves per spine vertex.

    Returns ``(host, group, shift)``: the window, the group generated by
    swapping leaves at each spine vertex, and the unit shift along the spine
    as a partial map.  Spine vertex ``i`` has id ``i + radius``; the leaves
    of spine id ``s`` are ``n + s * legs + k``.
    """
    n = 2 * radius + 1
    edges = {(i, i + 1) for i in range(n - 1)}
    edges |= {(s, n + s * legs + k) for s in range(n) for k in range(legs)}
    tree = FiniteTree(n * (legs + 1), frozenset(edges))
    host = TruncatedTree(tree, radius, radius + 1)
    total = n * (legs + 1)
    gens = []
    for s in range(n):
        for k in range(legs - 1):
            perm = list(range(total))
            a, b = n + s * legs + k, n + s * legs + k + 1
            perm[a], perm[b] = b, a
            gens.append(tuple(perm))
    images = [-1] * total
    for s in range(n - 1):
        images[s] = s + 1
        for k in range(legs):
            images[n + s * legs + k] = n + (s + 1) * legs + k
    return host, PermGroup(total, gens), PartialAutomorphism(host, tuple(images))
