"""Groups acting on trees: classification of automorphisms, translations
through edges, independence properties, half-tree stabilizers, commutator
approximants and quotient graphs.

Group elements are duck-typed.  Anything with the following protocol can be
used as a generator of a :class:`GeneratedAction`:

``host``            the :class:`TruncatedTree` the element is evaluated on
``image(v)``        image of host vertex ``v`` as a host vertex, or ``None``
``point(v)``        image of ``v`` in the model tree (may leave the window)
``distance_to(y, p)``  model distance from host vertex ``y`` to point ``p``
``a @ b``           composition (``b`` first), ``inverse()``, ``identity_like()``
``key()``           hashable value identifying the element
``exact``           whether composition loses no information
``to_partial()``    the :class:`PartialAutomorphism` the element induces on the host

:class:`PartialAutomorphism` implements it for explicit image tables; the
regular-tree and line models in :mod:`arbor.regular` implement it exactly.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

from .canon import TreeForms
from .graphs import (
    FiniteGraph,
    FiniteTree,
    HalfTree,
    MultiEdge,
    MultiGraph,
    TruncatedTree,
    edge_key,
    half_tree_vertices,
    is_path,
    project_to_path,
)
from .perm import PermGroup, centralizer_elements, generated_by_point_stabilizers

EXHAUSTIVE_CAP = 10**5


class Inconclusive(RuntimeError):
    """The truncation window is too small to decide the question."""


class InvariantSubtree(RuntimeError):
    """The action leaves a proper subtree invariant."""


class WordCapExhausted(RuntimeError):
    """A word search reached its length cap without an answer."""


class PreconditionFailed(ValueError):
    """An input violates a stated precondition; ``clause`` names which."""

    def __init__(self, clause: str, detail=None):
        super().__init__(clause if detail is None else f"{clause}: {detail}")
        self.clause = clause
        self.detail = detail


class InvalidWitness(ValueError):
    def __init__(self, half: HalfTree, reason: str):
        super().__init__(f"witness for half-tree {half.edge} side {half.side}: {reason}")
        self.half = half
        self.reason = reason


@dataclass(frozen=True)
class Aborted:
    """A cancelled search.  Never carries a partial answer."""

    reason: str = "cancelled"


# ---------------------------------------------------------------------------
# explicit partial automorphisms


@dataclass(frozen=True, eq=False)
class PartialAutomorphism:
    """Injective adjacency-preserving map from part of a window into it.

    ``images[v]`` is the image of ``v`` or ``-1`` where the map is undefined.
    """

    host: TruncatedTree
    images: tuple

    exact = property(lambda self: self.is_total)

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(int(x) for x in self.images))
        if len(self.images) != self.host.vertex_count:
            raise ValueError("one image entry per host vertex required")

    @classmethod
    def identity(cls, host: TruncatedTree) -> "PartialAutomorphism":
        return cls(host, tuple(range(host.vertex_count)))

    @classmethod
    def from_permutation(cls, host: TruncatedTree, perm: Sequence[int]) -> "PartialAutomorphism":
        return cls(host, tuple(perm))

    @classmethod
    def from_pairs(cls, host: TruncatedTree, pairs: Iterable[Sequence[int]]) -> "PartialAutomorphism":
        images = [-1] * host.vertex_count
        for v, w in pairs:
            images[v] = w
        return cls(host, tuple(images))

    def __eq__(self, other):
        return isinstance(other, PartialAutomorphism) and self.images == other.images and self.host == other.host

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"PartialAutomorphism(domain={len(self.domain)}/{self.host.vertex_count})"

    def image(self, v: int):
        x = self.images[v]
        return None if x < 0 else x

    __call__ = image
    point = image

    def distance_to(self, y: int, p: int) -> int:
        return self.host.tree.distance(y, p)

    @cached_property
    def domain(self) -> frozenset:
        return frozenset(v for v, x in enumerate(self.images) if x >= 0)

    @property
    def is_total(self) -> bool:
        return all(x >= 0 for x in self.images)

    @property
    def domain_radius(self) -> int:
        depth = self.host.depth
        missing = [depth[v] for v, x in enumerate(self.images) if x < 0]
        return (min(missing) - 1) if missing else self.host.radius

    def identity_like(self) -> "PartialAutomorphism":
        return PartialAutomorphism.identity(self.host)

    def __matmul__(self, other: "PartialAutomorphism") -> "PartialAutomorphism":
        if other.host is not self.host and other.host != self.host:
            raise ValueError("composition across different hosts")
        mine = self.images
        return PartialAutomorphism(self.host, tuple(mine[o] if o >= 0 else -1 for o in other.images))

    def inverse(self) -> "PartialAutomorphism":
        out = [-1] * len(self.images)
        for v, x in enumerate(self.images):
            if x >= 0:
                out[x] = v
        return PartialAutomorphism(self.host, tuple(out))

    def key(self):
        return self.images

    def to_partial(self) -> "PartialAutomorphism":
        return self

    def is_identity(self) -> bool:
        return all(x == v for v, x in enumerate(self.images) if x >= 0)

    def as_permutation(self) -> tuple:
        if not self.is_total:
            raise ValueError("map is not total on the host")
        return self.images

    def problems(self) -> list[str]:
        """Reasons this is not a partial automorphism (empty when valid)."""
        out = []
        imgs = [x for x in self.images if x >= 0]
        if len(set(imgs)) != len(imgs):
            out.append("not injective")
        if any(x >= self.host.vertex_count for x in imgs):
            out.append("image outside host")
            return out
        tree = self.host.tree
        for a, b in tree.sorted_edges:
            ia, ib = self.images[a], self.images[b]
            if ia >= 0 and ib >= 0 and not tree.has_edge(ia, ib):
                out.append(f"edge {(a, b)} not mapped to an edge")
                break
        return out

    def validate(self) -> "PartialAutomorphism":
        issues = self.problems()
        if issues:
            raise ValueError("; ".join(issues))
        return self

    def to_dict(self, host_ref: str | None = None) -> dict:
        return {
            "host_ref": host_ref,
            "domain_radius": self.domain_radius,
            "map": [[v, x] for v, x in enumerate(self.images) if x >= 0],
        }


def _partial(x) -> PartialAutomorphism:
    return x.to_partial()


# ---------------------------------------------------------------------------
# Tits classification


@dataclass(frozen=True)
class AutomorphismClass:
    kind: str  # "elliptic" | "inversion" | "translation"
    fixed: tuple = ()
    edge: tuple | None = None
    axis: tuple = ()
    length: int = 0

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "elliptic":
            out["fixed"] = list(self.fixed)
        elif self.kind == "inversion":
            out["edge"] = list(self.edge)
        else:
            out["axis"] = list(self.axis)
            out["length"] = self.length
        return out

    def axis_contains_edge(self, e: Sequence[int]) -> bool:
        a, b = e
        axis = self.axis
        return any({axis[i], axis[i + 1]} == {a, b} for i in range(len(axis) - 1))


def classify(aut) -> AutomorphismClass:
    """Elliptic, inversion or translation, read off from displacements.

    The minimum displacement must be attained at a vertex whose whole
    neighbourhood is evaluable; otherwise the window may be hiding a smaller
    displacement and :class:`Inconclusive` is raised.
    """
    p = _partial(aut)
    host = p.host
    tree = host.tree
    dom = sorted(p.domain)
    if not dom:
        raise Inconclusive("empty domain")
    for a, b in tree.sorted_edges:
        if p.images[a] == b and p.images[b] == a:
            return AutomorphismClass("inversion", edge=(a, b))
    disp = {v: tree.distance(v, p.images[v]) for v in dom}
    k = min(disp.values())
    minimizers = [v for v in dom if disp[v] == k]

    def safe(v):
        if host.truncated and v in host.boundary:
            return False
        return all(p.images[w] >= 0 for w in tree.adjacency[v])

    if not any(safe(v) for v in minimizers):
        raise Inconclusive("minimum displacement only attained at the edge of the evaluable domain")
    if k == 0:
        return AutomorphismClass("elliptic", fixed=tuple(minimizers))
    # images of axis vertices are on the axis too; they cover the stretch of
    # the window whose own images fall outside it
    axis = _order_path(tree, set(minimizers) | {p.images[v] for v in minimizers})
    m = minimizers[0]
    if axis.index(p.images[m]) < axis.index(m):
        axis = axis[::-1]
    return AutomorphismClass("translation", axis=tuple(axis), length=k)


def _order_path(tree: FiniteTree, vertices: Sequence[int]) -> list[int]:
    vs = set(vertices)
    if len(vs) == 1:
        return list(vs)
    ends = [v for v in sorted(vs) if sum(w in vs for w in tree.adjacency[v]) <= 1]
    if len(ends) != 2:
        raise AssertionError("minimal displacement set is not a path")
    path = [ends[0]]
    prev = -1
    while path[-1] != ends[1]:
        nxt = [w for w in tree.adjacency[path[-1]] if w in vs and w != prev]
        prev = path[-1]
        path.append(nxt[0])
    if len(path) != len(vs):
        raise AssertionError("minimal displacement set is not a path")
    return path


# ---------------------------------------------------------------------------
# actions given by generators


@dataclass
class SearchOutcome:
    status: str  # "found" | "closed" | "cap" | "aborted"
    element: object = None
    word: tuple = ()


@dataclass(eq=False)
class GeneratedAction:
    """A group acting on a (window onto a) tree, given by generators.

    ``member`` optionally decides membership in the group for arbitrary
    elements (used to validate externally supplied witnesses); ``witness``
    optionally supplies, per half-tree, an element fixing it pointwise.
    """

    host: TruncatedTree
    generators: tuple
    word_cap: int = 12
    member: Callable[[object], bool] | None = None
    witness: Callable[[HalfTree], object] | None = None
    cap: int = EXHAUSTIVE_CAP
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)
    _group: PermGroup | None = field(default=None, repr=False)

    def __post_init__(self):
        self.generators = tuple(self.generators)
        for g in self.generators:
            if g.host is not self.host and g.host != self.host:
                raise ValueError("generator lives on a different host")

    @classmethod
    def from_permutations(cls, tree: FiniteTree | TruncatedTree, perms: Iterable[Sequence[int]], **kw):
        host = tree if isinstance(tree, TruncatedTree) else TruncatedTree.whole(tree)
        gens = []
        for perm in perms:
            g = PartialAutomorphism.from_permutation(host, perm)
            g.validate()
            gens.append(g)
        return cls(host, tuple(gens), **kw)

    @classmethod
    def from_group(cls, tree: FiniteTree | TruncatedTree, group: PermGroup, **kw):
        kw.setdefault("cap", group.cap)
        return cls.from_permutations(tree, group.generators, **kw)

    @property
    def tree(self) -> FiniteTree:
        return self.host.tree

    @property
    def is_total(self) -> bool:
        return all(isinstance(g, PartialAutomorphism) and g.is_total for g in self.generators)

    def group(self) -> PermGroup:
        if not self.is_total:
            raise PreconditionFailed("exhaustive mode needs total generators on a finite window")
        with self._lock:
            if self._group is None:
                perms = [g.as_permutation() for g in self.generators]
                self._group = PermGroup(self.host.vertex_count, perms, cap=self.cap)
            return self._group

    def letters(self) -> list[tuple[str, object]]:
        out, seen = [], set()
        for i, g in enumerate(self.generators):
            if g.key() not in seen:
                seen.add(g.key())
                out.append((f"g{i}", g))
        for i, g in enumerate(self.generators):
            inv = g.inverse()
            if inv.key() not in seen:
                seen.add(inv.key())
                out.append((f"g{i}^-1", inv))
        return out

    def search(self, accept: Callable[[object], bool], cancel: threading.Event | None = None) -> SearchOutcome:
        """Breadth-first search over words, shortest first.

        Generators come in declaration order with inverses after positives;
        words are extended on the right and duplicate elements are skipped.
        ``closed`` means every element of the group was visited.
        """
        if cancel is not None and cancel.is_set():
            return SearchOutcome("aborted")
        letters = self.letters()
        if not letters:
            return SearchOutcome("closed")
        exact = all(getattr(g, "exact", False) for _, g in letters)
        seen = set()
        frontier = []
        for name, g in letters:
            seen.add(g.key())
            if accept(g):
                return SearchOutcome("found", g, (name,))
            frontier.append(((name,), g))
        length = 1
        while frontier and length < self.word_cap:
            nxt = []
            for word, x in frontier:
                for name, s in letters:
                    if cancel is not None and cancel.is_set():
                        return SearchOutcome("aborted")
                    y = x @ s
                    k = y.key()
                    if k in seen:
                        continue
                    seen.add(k)
                    if accept(y):
                        return SearchOutcome("found", y, word + (name,))
                    nxt.append((word + (name,), y))
            frontier = nxt
            length += 1
        if not frontier and exact:
            return SearchOutcome("closed")
        return SearchOutcome("cap")


def _in_half(elem, x: int, a: int, b: int) -> bool | None:
    """Whether ``elem(x)`` lies on the ``b`` side of the edge ``{a, b}``."""
    p = elem.point(x)
    if p is None:
        return None
    return elem.distance_to(b, p) < elem.distance_to(a, p)


def _shrinks(elem, a: int, b: int) -> bool:
    """Whether ``elem`` maps the half-tree on the ``b`` side of ``{a, b}`` properly into itself."""
    pa, pb = elem.point(a), elem.point(b)
    if pa is None or pb is None:
        return False
    d = elem.distance_to
    return d(b, pa) < d(a, pa) and d(b, pb) < d(a, pb) and d(a, pa) < d(a, pb)


def orbit_half_tree_violations(action: GeneratedAction) -> list[tuple]:
    """Orbits missing a side of an interior edge (total actions only)."""
    group = action.group()
    orbits = group.orbits()
    out = []
    for e in action.host.interior_edges():
        for side in e:
            verts = half_tree_vertices(action.tree, HalfTree(e, side))
            for orb in orbits:
                if not any(x in verts for x in orb):
                    out.append((e, side, orb[0]))
                    break
    return out


@dataclass
class TranslationResult:
    element: object
    word: str
    classification: AutomorphismClass
    steps: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"word": self.word, "classification": self.classification.to_dict(), "steps": self.steps}


def _word_str(word) -> str:
    return " ".join(word)


def translation_through_edge(action: GeneratedAction, e: Sequence[int], cancel: threading.Event | None = None):
    """A translation of the action whose axis contains the edge ``e = (u, v)``.

    Follows the classical argument: ``g1`` moves ``u`` into the ``v`` side;
    if that does not already push the ``v`` side into itself, ``g2`` moves
    ``v`` into the ``u`` side, and one of ``g2`` or ``g1 g2`` works.
    Elements inverting ``e`` are skipped by both searches, since two
    inversions of ``e`` compose to an element fixing it.
    Returns :class:`Aborted` when cancelled.
    """
    u, v = e
    if not action.tree.has_edge(u, v):
        raise ValueError(f"{tuple(e)} is not an edge")
    if action.is_total:
        bad = orbit_half_tree_violations(action)
        if bad:
            (edge, side, x) = bad[0]
            raise InvariantSubtree(f"orbit of {x} misses the {side} side of {edge}")

    def inverts(g):
        pu, pv = g.point(u), g.point(v)
        return pu is not None and pv is not None and g.distance_to(v, pu) == 0 and g.distance_to(u, pv) == 0

    def find(start, target_side, other):
        out = action.search(lambda g: _in_half(g, start, other, target_side) is True and not inverts(g), cancel)
        if out.status == "aborted":
            return out
        if out.status == "closed":
            raise InvariantSubtree(f"orbit of {start} never enters the {target_side} side of {tuple(e)}")
        if out.status == "cap":
            raise WordCapExhausted(f"no word of length <= {action.word_cap} moves {start} across {tuple(e)}")
        return out

    steps = []
    first = find(u, v, u)
    if isinstance(first, SearchOutcome) and first.status == "aborted":
        return Aborted()
    g1 = first.element
    steps.append({"g1": _word_str(first.word), "shrinks": _shrinks(g1, u, v)})
    if steps[-1]["shrinks"]:
        g, word = g1, first.word
    else:
        second = find(v, u, v)
        if second.status == "aborted":
            return Aborted()
        g2 = second.element
        steps.append({"g2": _word_str(second.word), "shrinks": _shrinks(g2, v, u)})
        if steps[-1]["shrinks"]:
            g, word = g2, second.word
        else:
            # g1 carries the u side into the v side and g2 the v side into the
            # u side, so g1 g2 pushes the v side properly into itself.
            g, word = g1 @ g2, first.word + second.word
    cls = classify(g)
    if cls.kind != "translation" or not cls.axis_contains_edge(e):
        raise AssertionError(f"constructed element is {cls.kind}, axis {cls.axis}, not through {tuple(e)}")
    return TranslationResult(g, _word_str(word), cls, steps)


# ---------------------------------------------------------------------------
# independence properties


@dataclass
class PropertyReport:
    holds: bool
    detail: dict = field(default_factory=dict)
    counterexample: tuple | None = None

    def to_dict(self) -> dict:
        out = {"holds": self.holds, "detail": self.detail}
        if self.counterexample is not None:
            out["counterexample"] = list(self.counterexample)
        return out


def property_E_check(action: GeneratedAction, e: Sequence[int]) -> PropertyReport:
    """Is the edge stabilizer the product of the two half-tree fixators?"""
    u, v = edge_key(*e)
    tree = action.tree
    if not tree.has_edge(u, v):
        raise ValueError(f"{(u, v)} is not an edge")
    group = action.group()
    edge_stab = group.pointwise_stabilizer([u, v])
    left = group.pointwise_stabilizer(half_tree_vertices(tree, HalfTree((u, v), u)))
    right = group.pointwise_stabilizer(half_tree_vertices(tree, HalfTree((u, v), v)))
    product = left.join(right)
    detail = {
        "edge_stabilizer_order": edge_stab.order(),
        "fixator_orders": [left.order(), right.order()],
    }
    holds = edge_stab.order() == left.order() * right.order()
    counter = None
    if not holds:
        counter = next(g for g in edge_stab.generators if not product.contains(g))
    return PropertyReport(holds, detail, counter)


def path_branches(tree: FiniteTree, path: Sequence[int]) -> list[list[int]]:
    """For each vertex of ``path`` the vertices projecting onto it."""
    index = {x: i for i, x in enumerate(path)}
    out = [[] for _ in path]
    for w in range(tree.vertex_count):
        out[index[project_to_path(tree, path, w)]].append(w)
    return out


def property_P_check(action: GeneratedAction, path: Sequence[int]) -> PropertyReport:
    """Does the fixator of the path split as the product of its branch actions?"""
    tree = action.tree
    path = list(path)
    if not is_path(tree, path):
        raise ValueError("not a path")
    group = action.group()
    fix = group.pointwise_stabilizer(path)
    factors = []
    for branch in path_branches(tree, path):
        index = {w: i for i, w in enumerate(branch)}
        gens = [tuple(index[g[w]] for w in branch) for g in fix.generators]
        factors.append(PermGroup(len(branch), gens, cap=group.cap).order())
    product = 1
    for f in factors:
        product *= f
    detail = {"path_fixator_order": fix.order(), "factor_orders": factors}
    return PropertyReport(fix.order() == product, detail)


def half_trees(host: TruncatedTree) -> list[HalfTree]:
    """Both sides of every interior edge, in edge order."""
    return [HalfTree(e, side) for e in host.interior_edges() for side in e]


def validate_half_tree_witness(action: GeneratedAction, half: HalfTree, elem) -> str | None:
    """Reason ``elem`` is not a nontrivial fixator element of ``half`` (None if it is)."""
    p = _partial(elem)
    issues = p.problems()
    if issues:
        return "; ".join(issues)
    verts = half_tree_vertices(action.tree, half)
    for x in sorted(verts):
        if p.images[x] != x:
            return f"moves {x}" if p.images[x] >= 0 else f"undefined at {x}"
    u, v = half.edge
    if p.images[u] != u or p.images[v] != v:
        return "does not fix the defining edge"
    if p.is_identity():
        return "acts trivially on its domain"
    if action.member is not None and not action.member(elem):
        return "not a member of the group"
    return None


@dataclass
class HalfTreeStatus:
    half: HalfTree
    nontrivial: bool
    exact: bool
    witness: object = None
    reason: str = ""


def half_tree_status(action: GeneratedAction, half: HalfTree, policy: str = "exhaustive") -> HalfTreeStatus:
    if policy == "exhaustive":
        fix = action.group().pointwise_stabilizer(half_tree_vertices(action.tree, half))
        wit = fix.generators[0] if fix.generators else None
        return HalfTreeStatus(half, wit is not None, True, wit)
    if policy == "witness":
        if action.witness is None:
            raise PreconditionFailed("witness mode needs a witness provider")
        elem = action.witness(half)
        if elem is None:
            return HalfTreeStatus(half, False, False, reason="no witness within the truncation")
        reason = validate_half_tree_witness(action, half, elem)
        if reason is not None:
            raise InvalidWitness(half, reason)
        return HalfTreeStatus(half, True, True, elem)
    if policy == "search":
        out = action.search(lambda g: validate_half_tree_witness(action, half, g) is None)
        if out.status == "found":
            return HalfTreeStatus(half, True, True, out.element)
        return HalfTreeStatus(half, False, out.status == "closed", reason=f"search {out.status}")
    raise ValueError(f"unknown policy {policy!r}")


@dataclass
class HReport:
    holds: bool
    failures: list
    statuses: list

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "failures": [{"edge": list(s.half.edge), "side": s.half.side, "reason": s.reason} for s in self.failures],
            "checked": len(self.statuses),
        }


def property_H_check(action: GeneratedAction, policy: str = "exhaustive") -> HReport:
    statuses = [half_tree_status(action, h, policy) for h in half_trees(action.host)]
    failures = [s for s in statuses if not s.nontrivial]
    for s in failures:
        if not s.reason:
            s.reason = "pointwise stabilizer is trivial"
    return HReport(not failures, failures, statuses)


# ---------------------------------------------------------------------------
# the half-tree trichotomy


@dataclass
class TrichotomyReport:
    case: str  # "both_trivial" | "both_nontrivial" | "mixed"
    edge: tuple
    exact: bool
    consistent: bool = True
    orientation: list = field(default_factory=list)  # (initial, terminal)
    root: int | None = None
    ray: tuple = ()

    def to_dict(self) -> dict:
        out = {"case": self.case, "edge": list(self.edge), "exact": self.exact, "consistent": self.consistent}
        if self.case == "mixed":
            out["orientation"] = [list(a) for a in self.orientation]
            out["root"] = self.root
            out["ray"] = list(self.ray)
        return out


def _case(a: HalfTreeStatus, b: HalfTreeStatus) -> str:
    if a.nontrivial and b.nontrivial:
        return "both_nontrivial"
    if not a.nontrivial and not b.nontrivial:
        return "both_trivial"
    return "mixed"


def half_tree_trichotomy(
    action: GeneratedAction, e: Sequence[int], policy: str = "exhaustive", check_minimality: bool = False
) -> TrichotomyReport:
    """Which of the three half-tree stabilizer patterns holds at ``e``.

    In the mixed case each interior edge ``{w, z}`` is directed ``w -> z``
    when the fixator of the ``w`` side is trivial.  Every interior vertex
    must then be the terminal vertex of exactly one directed edge, except a
    single root through which the invariant end leaves the window; the
    reported ray follows incoming edges from ``e`` to that root.
    """
    u, v = e
    if check_minimality and action.is_total:
        bad = orbit_half_tree_violations(action)
        if bad:
            raise InvariantSubtree(f"orbit of {bad[0][2]} misses a half-tree of {bad[0][0]}")
    status = {}
    for f in action.host.interior_edges():
        for side in f:
            h = HalfTree(f, side)
            status[(h.edge, side)] = half_tree_status(action, h, policy)
    key = edge_key(u, v)
    if key not in {f for f in action.host.interior_edges()}:
        raise ValueError(f"{tuple(e)} is not an interior edge")
    case = _case(status[(key, key[0])], status[(key, key[1])])
    exact = all(s.exact for s in status.values())
    cases = {_case(status[(f, f[0])], status[(f, f[1])]) for f in action.host.interior_edges()}
    report = TrichotomyReport(case, (u, v), exact, consistent=cases == {case})
    if case != "mixed":
        return report
    incoming: dict[int, list[int]] = {}
    orientation = []
    for f in action.host.interior_edges():
        a, b = f
        if not status[(f, a)].nontrivial:
            orientation.append((a, b))
            incoming.setdefault(b, []).append(a)
        else:
            orientation.append((b, a))
            incoming.setdefault(a, []).append(b)
    inner = sorted({x for f in action.host.interior_edges() for x in f})
    if any(len(incoming.get(x, [])) > 1 for x in inner):
        raise AssertionError("a vertex is the terminal vertex of two directed edges")
    roots = [x for x in inner if not incoming.get(x)]
    if len(roots) != 1:
        raise AssertionError(f"expected exactly one vertex without an incoming edge, got {roots}")
    ray = [v]
    while incoming.get(ray[-1]):
        ray.append(incoming[ray[-1]][0])
    report.orientation = orientation
    report.root = roots[0]
    report.ray = tuple(ray)
    return report


# ---------------------------------------------------------------------------
# commutator approximants


@dataclass
class CommutatorRow:
    n: int
    word: str
    domain_radius: int
    evaluable: int
    claimed: int
    agreement: int
    verified: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class CommutatorReport:
    rows: list
    monotone: bool
    common_domain: int

    @property
    def verified(self) -> bool:
        return all(r.verified for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "rows": [r.to_dict() for r in self.rows],
            "monotone": self.monotone,
            "common_domain": self.common_domain,
            "verified": self.verified,
        }


class DomainExhausted(RuntimeError):
    """The window no longer contains enough of the composed map."""


def commutator_approximants(g, h, e: Sequence[int], n_max: int) -> CommutatorReport:
    """Evaluate ``f_n = g h^n g^-1 h^-n`` for ``n = 0..n_max``.

    ``g`` must fix the ``u`` side of ``e = (u, v)`` pointwise and ``h`` must
    be a translation through ``e`` pushing the ``v`` side into itself.  For
    each ``n`` the map ``f_n`` is compared with ``g`` vertex by vertex on
    the region made of the ``u`` side and the part of the ``v`` side outside
    ``h^n`` of it, restricted to vertices where both maps are evaluable.
    """
    u, v = e
    host = h.host
    tree = host.tree
    if not tree.has_edge(u, v):
        raise ValueError(f"{tuple(e)} is not an edge")
    side_u = half_tree_vertices(tree, HalfTree((u, v), u))
    side_v = half_tree_vertices(tree, HalfTree((u, v), v))
    gp = _partial(g)
    moved = [x for x in sorted(side_u) if gp.images[x] != x]
    if moved:
        raise PreconditionFailed("g does not fix the u side pointwise", moved[:5])
    cls = classify(h)
    if cls.kind != "translation" or not cls.axis_contains_edge((u, v)):
        raise PreconditionFailed("h is not a translation with e on its axis", cls.to_dict())
    if not _shrinks(h, u, v):
        raise PreconditionFailed("h does not map the v side properly into itself")
    rows = []
    evaluables, claims = [], []
    g_inv = g.inverse()
    hn = h.identity_like()
    for n in range(n_max + 1):
        if n:
            hn = hn @ h
        f = g @ hn @ g_inv @ hn.inverse()
        fp = _partial(f)
        evaluable = {x for x in range(tree.vertex_count) if fp.images[x] >= 0 and gp.images[x] >= 0}
        if not evaluable:
            raise DomainExhausted(f"f_{n} has no evaluable vertex in the window")
        if hn.point(u) is None or hn.point(v) is None:
            raise DomainExhausted(f"h^{n} moves e out of the window")
        pu, pv = hn.point(u), hn.point(v)
        pushed = {x for x in side_v if hn.distance_to(x, pv) < hn.distance_to(x, pu)}
        claimed = {x for x in evaluable if x in side_u or (x in side_v and x not in pushed)}
        agreement = {x for x in evaluable if fp.images[x] == gp.images[x]}
        rows.append(
            CommutatorRow(
                n,
                f"g h^{n} g^-1 h^-{n}",
                fp.domain_radius,
                len(evaluable),
                len(claimed),
                len(agreement),
                claimed <= agreement,
            )
        )
        evaluables.append(evaluable)
        claims.append(claimed)
    common = set.intersection(*evaluables)
    sizes = [len(c & common) for c in claims]
    return CommutatorReport(rows, all(a <= b for a, b in zip(sizes, sizes[1:])), len(common))


# ---------------------------------------------------------------------------
# G+ and G++


def special_subgroup_generators(action: GeneratedAction, policy: str = "exhaustive") -> dict:
    """Generators of the edge-stabilizer subgroup and the half-tree-fixator subgroup.

    No closure is taken: at finite scale the second group is the subgroup
    generated by the half-tree fixators.  In witness mode only the
    half-tree part is available and ``gplus`` is ``None``.
    """
    gplusplus: list = []
    keys = set()
    if policy == "exhaustive":
        group = action.group()
        gplus: list | None = []
        for a, b in action.tree.sorted_edges:
            for g in group.pointwise_stabilizer([a, b]).generators:
                if g not in gplus:
                    gplus.append(g)
        for h in half_trees(action.host):
            for g in group.pointwise_stabilizer(half_tree_vertices(action.tree, h)).generators:
                if g not in keys:
                    keys.add(g)
                    gplusplus.append(g)
        return {"gplus": gplus, "gplusplus": gplusplus}
    for h in half_trees(action.host):
        st = half_tree_status(action, h, policy)
        if st.nontrivial and st.witness.key() not in keys:
            keys.add(st.witness.key())
            gplusplus.append(st.witness)
    return {"gplus": None, "gplusplus": gplusplus}


# ---------------------------------------------------------------------------
# quotient graphs


@dataclass
class QuotientReport:
    quotient: MultiGraph
    betti_1: int
    subdivided: bool
    vertex_orbits: list
    edge_orbits: list

    def to_dict(self) -> dict:
        return {
            "quotient": self.quotient.to_dict(),
            "betti_1": self.betti_1,
            "subdivided": self.subdivided,
            "vertex_orbits": [list(o) for o in self.vertex_orbits],
            "edge_orbits": [[list(e) for e in o] for o in self.edge_orbits],
        }


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra

    def classes(self):
        out: dict = {}
        for x in sorted(self.parent):
            out.setdefault(self.find(x), []).append(x)
        return sorted(out.values())


def _maps_of(tree: FiniteTree, group) -> tuple[TruncatedTree | None, list[tuple]]:
    """Image tables (with -1 for undefined) of the generators of ``group``."""
    if isinstance(group, PermGroup):
        if group.degree != tree.vertex_count:
            raise ValueError("group domain does not match the tree")
        return None, [tuple(g) for g in group.generators]
    if isinstance(group, GeneratedAction):
        if group.tree != tree:
            raise ValueError("action lives on a different tree")
        return group.host, [_partial(g).images for g in group.generators]
    raise TypeError("expected a PermGroup or a GeneratedAction")


def subdivide(tree: FiniteTree, maps: Sequence[Sequence[int]]):
    """Barycentric subdivision: the midpoint of the ``i``-th sorted edge gets id ``n + i``.

    Returns the subdivided tree, the extended image tables and the
    edge-to-midpoint map.
    """
    n = tree.vertex_count
    mid = {e: n + i for i, e in enumerate(tree.sorted_edges)}
    new_edges = []
    for (a, b), m in mid.items():
        new_edges += [(a, m), (b, m)]
    sub = FiniteTree.from_graph(FiniteGraph.from_edges(n + len(mid), new_edges))
    new_maps = []
    for img in maps:
        ext = list(img) + [-1] * len(mid)
        for (a, b), m in mid.items():
            if img[a] >= 0 and img[b] >= 0:
                ext[m] = mid[edge_key(img[a], img[b])]
        new_maps.append(tuple(ext))
    return sub, new_maps, mid


def inverts_an_edge(tree: FiniteTree, group: PermGroup) -> bool:
    """Some element swaps the ends of an edge: the edge's setwise stabilizer exceeds its fixator."""
    return any(group.setwise_stabilizer(e).order() > group.pointwise_stabilizer(e).order() for e in tree.sorted_edges)


def point_stabilizer_generation(tree: FiniteTree, group: PermGroup) -> dict:
    """Whether the group is generated by vertex stabilizers, on the subdivided tree if it inverts an edge.

    Subdividing makes the action inversion-free, which is the setting in which
    a tree quotient corresponds to generation by vertex stabilizers.
    """
    if group.degree != tree.vertex_count:
        raise ValueError("group domain does not match the tree")
    if not inverts_an_edge(tree, group):
        return {**generated_by_point_stabilizers(group), "subdivided": False}
    sub, maps, _ = subdivide(tree, group.generators)
    out = generated_by_point_stabilizers(PermGroup(sub.vertex_count, maps, cap=group.cap))
    return {**out, "subdivided": True}


def quotient_multigraph(tree: FiniteTree, group, vertices: Iterable[int] | None = None) -> QuotientReport:
    """Quotient of ``tree`` by ``group``: vertex orbits joined by edge orbits.

    Generators may be partial (a window onto a larger tree); orbits are then
    generated by the evaluable images.  ``vertices`` restricts attention to
    a subtree of the window (default: all of it).  If some element inverts
    an edge, the tree is subdivided first.
    """
    host, maps = _maps_of(tree, group)
    keep = set(range(tree.vertex_count)) if vertices is None else set(vertices)
    for img in maps:
        for a, b in tree.sorted_edges:
            ia, ib = img[a], img[b]
            if ia >= 0 and ib >= 0 and not tree.has_edge(ia, ib):
                raise ValueError(f"group element maps edge {(a, b)} to a non-edge")
    edges = [e for e in tree.sorted_edges if e[0] in keep and e[1] in keep]
    arcs = _UnionFind([(a, b) for a, b in edges] + [(b, a) for a, b in edges])
    for img in maps:
        for a, b in edges:
            ia, ib = img[a], img[b]
            if ia in keep and ib in keep and ia >= 0 and ib >= 0:
                arcs.union((a, b), (ia, ib))
                arcs.union((b, a), (ib, ia))
    inverted = any(arcs.find((a, b)) == arcs.find((b, a)) for a, b in edges)
    if inverted:
        sub, new_maps, mid = subdivide(tree, maps)
        new_keep = keep | {m for (a, b), m in mid.items() if a in keep and b in keep}
        tree, maps, keep = sub, new_maps, new_keep
        edges = [e for e in tree.sorted_edges if e[0] in keep and e[1] in keep]
    verts = _UnionFind(sorted(keep))
    undirected = _UnionFind(edges)
    for img in maps:
        for x in keep:
            if img[x] >= 0 and img[x] in keep:
                verts.union(x, img[x])
        for a, b in edges:
            ia, ib = img[a], img[b]
            if ia in keep and ib in keep and ia >= 0 and ib >= 0:
                undirected.union((a, b), edge_key(ia, ib))
    vclasses = verts.classes()
    vindex = {x: i for i, cls in enumerate(vclasses) for x in cls}
    eclasses = undirected.classes()
    medges = []
    for i, cls in enumerate(eclasses):
        a, b = cls[0]
        ends = (vindex[a],) if vindex[a] == vindex[b] else tuple(sorted((vindex[a], vindex[b])))
        medges.append(MultiEdge(i, ends))
    q = MultiGraph(len(vclasses), tuple(medges))
    return QuotientReport(q, q.betti_number(), inverted, vclasses, eclasses)


# ---------------------------------------------------------------------------
# quasi-center diagnostic


def ball_centralizer_diagnostic(action: GeneratedAction, S: Iterable[int], limit: int = EXHAUSTIVE_CAP) -> list[tuple]:
    """Non-identity elements commuting with every generator of the fixator of ``S``.

    An empty answer for growing ``S`` is evidence (never proof) that the
    quasi-center is trivial.
    """
    group = action.group()
    fix = group.pointwise_stabilizer(S)
    return centralizer_elements(group, fix.generators, limit, invariant_graph=action.tree)


# ---------------------------------------------------------------------------
# automorphism groups of finite trees


def tree_aut_generators(tree: FiniteTree, colors: Sequence | None = None, cap: int | None = None) -> PermGroup:
    """Generators of the full (color-preserving) automorphism group of a finite tree.

    The tree is rooted at its center (or central edge).  At every vertex,
    consecutive children with isomorphic branches are swapped; a bicentral
    tree with isomorphic halves also gets the swap of its two halves.
    """
    if not isinstance(tree, FiniteTree):
        tree = FiniteTree.from_graph(tree)
    forms = TreeForms(tree, colors)
    n = tree.vertex_count
    centers = tree.centers()
    gens = []

    def swap(p1, c1, p2, c2):
        img = list(range(n))
        for a, b in forms.isomorphism(p1, c1, p2, c2).items():
            img[a] = b
            img[b] = a
        return tuple(img)

    if len(centers) == 1:
        roots = [(-1, centers[0])]
    else:
        a, b = centers
        roots = [(b, a), (a, b)]
        if forms.branch(b, a) == forms.branch(a, b):
            gens.append(swap(b, a, a, b))
    stack = list(roots)
    while stack:
        p, c = stack.pop()
        kids = forms.sorted_children(p, c)
        for w1, w2 in zip(kids, kids[1:]):
            if forms.branch(c, w1) == forms.branch(c, w2):
                gens.append(swap(c, w1, c, w2))
        stack.extend((c, w) for w in kids)
    return PermGroup(n, gens, cap=cap)
