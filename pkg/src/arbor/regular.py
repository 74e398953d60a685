"""Regular trees, lines, and the degree-6 colored example.

The q-regular tree is modelled as the Cayley graph of the free product of
q copies of Z/2: vertices are reduced words over the letters ``0..q-1`` (no
letter repeated twice in a row) and ``w`` is adjacent to ``w + (c,)``.  The
maps ``w -> a . pi(w)`` (left multiplication after a letter permutation) are
automorphisms, closed under composition and inversion, and are evaluated
exactly, far outside any finite window.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

from .canon import TreeForms
from .graphs import FiniteTree, HalfTree, TruncatedTree, half_tree_vertices
from .perm import PermGroup, check_perm, compose, inverse, orbit_partition
from .trees import (
    GeneratedAction,
    PartialAutomorphism,
    half_trees,
    tree_aut_generators,
    validate_half_tree_witness,
)

VERTEX_CAP = 2_000_000

Word = tuple


def reduce_product(a: Word, b: Word) -> Word:
    """The reduced form of the concatenation ``a . b`` of two reduced words."""
    i = 0
    while i < len(a) and i < len(b) and a[len(a) - 1 - i] == b[i]:
        i += 1
    return a[: len(a) - i] + b[i:]


def word_distance(a: Word, b: Word) -> int:
    k = 0
    while k < len(a) and k < len(b) and a[k] == b[k]:
        k += 1
    return len(a) + len(b) - 2 * k


def regular_tree_size(q: int, d: int) -> int:
    return 1 + q * ((q - 1) ** d - 1) // (q - 2)


def build_truncated_regular_tree(q: int, d: int, vertex_cap: int = VERTEX_CAP) -> TruncatedTree:
    """Ball of radius ``d`` in the ``q``-regular tree; vertex ids in shortlex order of words."""
    if q < 3:
        raise ValueError("degree must be at least 3")
    if d < 1:
        raise ValueError("radius must be at least 1")
    if regular_tree_size(q, d) > vertex_cap:
        raise ValueError(f"ball has {regular_tree_size(q, d)} vertices, over the cap {vertex_cap}")
    words: list[Word] = [()]
    edges = []
    start = 0
    for _ in range(d):
        end = len(words)
        for i in range(start, end):
            w = words[i]
            for c in range(q):
                if w and w[-1] == c:
                    continue
                edges.append((i, len(words)))
                words.append(w + (c,))
        start = end
    tree = FiniteTree(len(words), frozenset(edges))
    return TruncatedTree(tree, 0, d, interior_degree=q, labels=tuple(words))


class _ModelElement:
    """Shared plumbing for exact maps of an infinite model evaluated on a window."""

    host: TruncatedTree
    exact = True

    def apply(self, label):
        raise NotImplementedError

    def point(self, v: int):
        return self.apply(self.host.labels[v])

    def image(self, v: int):
        return self.host.label_index.get(self.point(v))

    __call__ = image

    def to_partial(self) -> PartialAutomorphism:
        idx = self.host.label_index
        return PartialAutomorphism(self.host, tuple(idx.get(self.apply(lab), -1) for lab in self.host.labels))


@dataclass(frozen=True, eq=False)
class RegularTreeMap(_ModelElement):
    """``w -> a . pi(w)`` on the regular tree."""

    host: TruncatedTree
    a: Word
    pi: tuple

    def __post_init__(self):
        check_perm(self.pi)
        object.__setattr__(self, "a", tuple(self.a))
        object.__setattr__(self, "pi", tuple(self.pi))
        if any(x == y for x, y in zip(self.a, self.a[1:])):
            raise ValueError("translation word must be reduced")

    def __repr__(self):
        return f"RegularTreeMap(a={''.join(map(str, self.a)) or 'e'}, pi={self.pi})"

    def apply(self, w: Word) -> Word:
        pi = self.pi
        return reduce_product(self.a, tuple(pi[c] for c in w))

    def distance_to(self, y: int, p: Word) -> int:
        return word_distance(self.host.labels[y], p)

    def key(self):
        return ("affine", self.a, self.pi)

    def identity_like(self) -> "RegularTreeMap":
        return RegularTreeMap(self.host, (), tuple(range(len(self.pi))))

    def inverse(self) -> "RegularTreeMap":
        pinv = inverse(self.pi)
        return RegularTreeMap(self.host, tuple(pinv[c] for c in reversed(self.a)), pinv)

    def __matmul__(self, other):
        if isinstance(other, RegularTreeMap):
            a = reduce_product(self.a, tuple(self.pi[c] for c in other.a))
            return RegularTreeMap(self.host, a, compose(self.pi, other.pi))
        return ComposedMap.of(self, other)


@dataclass(frozen=True, eq=False)
class BranchSwap(_ModelElement):
    """Exchange branches at vertex ``at`` by a letter permutation ``sigma`` of its children.

    ``sigma`` must fix the letter leading from ``at`` back towards the root.
    """

    host: TruncatedTree
    at: Word
    sigma: tuple

    def __post_init__(self):
        check_perm(self.sigma)
        object.__setattr__(self, "at", tuple(self.at))
        if self.at and self.sigma[self.at[-1]] != self.at[-1]:
            raise ValueError("sigma must fix the letter towards the root")

    def apply(self, w: Word) -> Word:
        k = len(self.at)
        if len(w) > k and w[:k] == self.at:
            return self.at + tuple(self.sigma[c] for c in w[k:])
        return w

    def distance_to(self, y: int, p: Word) -> int:
        return word_distance(self.host.labels[y], p)

    def key(self):
        return ("swap", self.at, self.sigma)

    def identity_like(self) -> RegularTreeMap:
        return RegularTreeMap(self.host, (), tuple(range(len(self.sigma))))

    def inverse(self) -> "BranchSwap":
        return BranchSwap(self.host, self.at, inverse(self.sigma))

    def __matmul__(self, other):
        return ComposedMap.of(self, other)


@dataclass(frozen=True, eq=False)
class ComposedMap(_ModelElement):
    """Composition of model maps, applied right to left."""

    host: TruncatedTree
    parts: tuple

    @classmethod
    def of(cls, *maps) -> "ComposedMap":
        parts = []
        for m in maps:
            parts.extend(m.parts if isinstance(m, ComposedMap) else (m,))
        return cls(maps[0].host, tuple(parts))

    def apply(self, w):
        for m in reversed(self.parts):
            w = m.apply(w)
        return w

    def distance_to(self, y: int, p) -> int:
        return self.parts[0].distance_to(y, p)

    def key(self):
        return ("composed",) + tuple(m.key() for m in self.parts)

    def identity_like(self):
        return self.parts[0].identity_like()

    def inverse(self) -> "ComposedMap":
        return ComposedMap(self.host, tuple(m.inverse() for m in reversed(self.parts)))

    def __matmul__(self, other):
        return ComposedMap.of(self, other)


def translation(host: TruncatedTree, length: int) -> RegularTreeMap:
    """A translation of the given length whose axis passes through the root and ``(0,)``.

    Length 1 uses ``w -> 0 . pi(w)`` with ``pi`` the 3-cycle on the first
    three letters; longer ones multiply by ``0 1 2 0 1 ...``.  The axis runs
    through the edge ``{(), (0,)}`` with the root moving towards ``(0,)``.
    """
    q = host.interior_degree
    if length == 1:
        pi = list(range(q))
        pi[0], pi[1], pi[2] = 1, 2, 0
        return RegularTreeMap(host, (0,), tuple(pi))
    return RegularTreeMap(host, tuple(i % 3 for i in range(length)), tuple(range(q)))


def left_multiplication(host: TruncatedTree, b: Word) -> RegularTreeMap:
    return RegularTreeMap(host, tuple(b), tuple(range(host.interior_degree)))


def branch_swap(host: TruncatedTree, at: Word, c1: int, c2: int) -> BranchSwap:
    sigma = list(range(host.interior_degree))
    sigma[c1], sigma[c2] = c2, c1
    return BranchSwap(host, at, tuple(sigma))


# ---------------------------------------------------------------------------
# the line


def build_line_window(radius: int) -> TruncatedTree:
    """The integers ``-radius..radius`` as a path; vertex ``i`` is the integer ``i - radius``."""
    n = 2 * radius + 1
    tree = FiniteTree(n, frozenset((i, i + 1) for i in range(n - 1)))
    return TruncatedTree(tree, radius, radius, interior_degree=2, labels=tuple(range(-radius, radius + 1)))


@dataclass(frozen=True, eq=False)
class LineMap(_ModelElement):
    """``x -> sign * x + shift`` on the integer line."""

    host: TruncatedTree
    sign: int
    shift: int

    def __repr__(self):
        return f"LineMap({'-' if self.sign < 0 else ''}x{self.shift:+d})"

    def apply(self, x: int) -> int:
        return self.sign * x + self.shift

    def distance_to(self, y: int, p: int) -> int:
        return abs(self.host.labels[y] - p)

    def key(self):
        return ("line", self.sign, self.shift)

    def identity_like(self) -> "LineMap":
        return LineMap(self.host, 1, 0)

    def inverse(self) -> "LineMap":
        return LineMap(self.host, self.sign, -self.sign * self.shift)

    def __matmul__(self, other: "LineMap") -> "LineMap":
        return LineMap(self.host, self.sign * other.sign, self.sign * other.shift + self.shift)


# ---------------------------------------------------------------------------
# the degree-6 colored example

RED = 0
COLOR_NAMES = ("red", "c1", "c2", "c3")


@dataclass(frozen=True, eq=False)
class ColoredTruncatedTree:
    """Ball in the 6-regular tree; one bipartition class red, the other colored c1, c2, c3."""

    tree: TruncatedTree
    parts: tuple  # bipartition class per vertex: 0 for the red class
    colors: tuple  # 0 = red, 1..3 = c1..c3

    @cached_property
    def forms(self) -> TreeForms:
        return TreeForms(self.tree.tree, self.colors)

    def color_name(self, v: int) -> str:
        return COLOR_NAMES[self.colors[v]]

    def neighbor_colors(self, v: int) -> list[int]:
        return sorted(self.colors[w] for w in self.tree.tree.adjacency[v])


def _color_children(tree: TruncatedTree) -> tuple:
    colors = [RED] * tree.vertex_count
    adj = tree.tree.adjacency
    depth = tree.depth
    for v in sorted(range(tree.vertex_count), key=lambda x: (depth[x], x)):
        kids = [w for w in adj[v] if depth[w] == depth[v] + 1]
        if depth[v] % 2:
            assigned = [RED] * len(kids)
        else:
            pool = [1, 1, 2, 2, 3, 3]
            if depth[v]:
                parent = next(w for w in adj[v] if depth[w] == depth[v] - 1)
                pool.remove(colors[parent])
            assigned = pool
        for w, c in zip(kids, assigned):
            colors[w] = c
    return tuple(colors)


def color_permutation_map(ct: ColoredTruncatedTree, sigma: Sequence[int]) -> tuple:
    """A ball automorphism carrying color ``c`` to ``sigma[c]`` (red fixed)."""
    if sigma[RED] != RED:
        raise ValueError("red is fixed")
    tree = ct.tree
    adj = tree.tree.adjacency
    depth = tree.depth
    img = [-1] * tree.vertex_count
    img[tree.center] = tree.center
    stack = [tree.center]
    while stack:
        x = stack.pop()
        y = img[x]
        kids_x = [w for w in adj[x] if depth[w] == depth[x] + 1]
        kids_y = [w for w in adj[y] if depth[w] == depth[y] + 1]
        for c in sorted(set(ct.colors[w] for w in kids_x)):
            src = [w for w in kids_x if ct.colors[w] == c]
            dst = [w for w in kids_y if ct.colors[w] == sigma[c]]
            if len(src) != len(dst):
                raise ValueError("coloring is not compatible with the color permutation")
            for a, b in zip(src, dst):
                img[a] = b
                stack.append(a)
    return tuple(img)


@dataclass
class ColoredExample:
    tree: ColoredTruncatedTree
    C_gens: list
    G_gens: list

    def is_color_preserving(self, perm) -> bool:
        return is_color_preserving(self.tree, perm)

    def is_partition_preserving(self, perm) -> bool:
        return is_partition_preserving(self.tree, perm)

    def action(self, group: str = "G", **kw) -> GeneratedAction:
        gens = self.G_gens if group == "G" else self.C_gens
        member = self.is_partition_preserving if group == "G" else self.is_color_preserving
        kw.setdefault("member", lambda g: member(g.to_partial()))
        kw.setdefault("witness", lambda h: half_tree_fixing_witness(self.tree, h))
        return GeneratedAction.from_permutations(self.tree.tree, gens, **kw)


def build_colored_example(d: int) -> ColoredExample:
    """The colored ball of radius ``d`` with generators of its color- and partition-preserving groups."""
    if d < 2:
        raise ValueError("radius 2 or more is needed for an interior red vertex beyond the center")
    host = build_truncated_regular_tree(6, d)
    colors = _color_children(host)
    parts = tuple(x % 2 for x in host.depth)
    ct = ColoredTruncatedTree(host, parts, colors)
    c_gens = list(tree_aut_generators(host.tree, colors).generators)
    g_gens = c_gens + [color_permutation_map(ct, (0, 2, 1, 3)), color_permutation_map(ct, (0, 2, 3, 1))]
    return ColoredExample(ct, c_gens, g_gens)


def _color_map(ct: ColoredTruncatedTree, perm) -> dict | None:
    p = perm if isinstance(perm, PartialAutomorphism) else PartialAutomorphism(ct.tree, tuple(perm))
    if p.problems():
        return None
    sigma: dict[int, int] = {}
    for v, x in enumerate(p.images):
        if x < 0:
            continue
        a, b = ct.colors[v], ct.colors[x]
        if sigma.setdefault(a, b) != b:
            return None
    return sigma


def is_color_preserving(ct: ColoredTruncatedTree, perm) -> bool:
    sigma = _color_map(ct, perm)
    return sigma is not None and all(a == b for a, b in sigma.items())


def is_partition_preserving(ct: ColoredTruncatedTree, perm) -> bool:
    sigma = _color_map(ct, perm)
    return sigma is not None and len(set(sigma.values())) == len(sigma) and sigma.get(RED, RED) == RED


@dataclass(frozen=True)
class LocalActionSpec:
    """Allowed local permutations of neighbor slots, per vertex class.

    A slot of vertex ``x`` is one of its neighbors; an element acts locally
    at ``x`` by carrying the slots of ``x`` to those of its image.  For the
    colored example red vertices must respect slot colors (up to a global
    color permutation) and colored vertices are unrestricted.
    """

    red_respects_colors: bool = True

    def admits(self, ct: ColoredTruncatedTree, perm) -> bool:
        sigma = _color_map(ct, perm)
        if sigma is None:
            return False
        return not self.red_respects_colors or len(set(sigma.values())) == len(sigma)


def _qualifying_pairs(ct: ColoredTruncatedTree, half: HalfTree, first_only: bool):
    tree = ct.tree.tree
    fixed = half_tree_vertices(tree, half)
    forms = ct.forms
    out = []
    queue = [(half.side, half.other)]
    for parent, w in queue:
        kids = [c for c in tree.adjacency[w] if c != parent]
        groups: dict[tuple, list[int]] = {}
        for c in kids:
            groups.setdefault((ct.colors[c], forms.branch(w, c)), []).append(c)
        for key in sorted(groups, key=lambda k: groups[k][0]):
            members = groups[key]
            for i in range(len(members)):
                for j in range(i + 1, len(members)):
                    out.append((w, members[i], members[j]))
                    if first_only:
                        return out
        queue.extend((w, c) for c in kids)
    assert not any(x in fixed for _, a, b in out for x in (a, b))
    return out


def _swap_table(ct: ColoredTruncatedTree, w: int, a: int, b: int) -> PartialAutomorphism:
    img = list(range(ct.tree.vertex_count))
    for x, y in ct.forms.isomorphism(w, a, w, b).items():
        img[x], img[y] = y, x
    return PartialAutomorphism(ct.tree, tuple(img))


def half_tree_fixing_witness(ct: ColoredTruncatedTree, half: HalfTree) -> PartialAutomorphism | None:
    """Swap of two same-colored, equally shaped sibling branches on the far side of ``half``.

    The swap site is the vertex nearest the edge (breadth first, then by id)
    on the side not fixed by ``half``.  ``None`` means no such pair exists
    inside the window, which says nothing about the infinite tree.
    """
    pairs = _qualifying_pairs(ct, half, first_only=True)
    return _swap_table(ct, *pairs[0]) if pairs else None


def half_tree_fixing_witnesses(ct: ColoredTruncatedTree, half: HalfTree) -> list[PartialAutomorphism]:
    """Every sibling-branch swap that :func:`half_tree_fixing_witness` could choose from, at every site."""
    return [_swap_table(ct, *p) for p in _qualifying_pairs(ct, half, first_only=False)]


@dataclass
class ColoredReport:
    depth: int
    check_a: bool
    check_b: bool
    witnesses: int
    half_trees: int
    failures: list = field(default_factory=list)

    @property
    def verdict(self) -> str:
        if self.check_a and self.check_b:
            return "consistent with G++ = C at this depth"
        return "not consistent with G++ = C at this depth"

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "check_a_witnesses_color_preserving": self.check_a,
            "check_b_interior_orbits_match": self.check_b,
            "witnesses": self.witnesses,
            "half_trees": self.half_trees,
            "failures": self.failures,
            "verdict": self.verdict,
            "open_question": "orbit equality is evidence for the reverse inclusion, not a factorization of every color-preserving element",
        }


def verify_gplusplus_equals_color_group(
    d: int, witness_hook: Callable[[HalfTree, PartialAutomorphism], PartialAutomorphism] | None = None
) -> ColoredReport:
    """Finite-depth evidence that half-tree fixators generate the color-preserving group.

    (a) every witness over all interior half-trees preserves colors;
    (b) the witnesses have the same orbits on the interior as the
    color-preserving generators.  Witnesses are validated structurally by
    the independent half-tree validator before either check.
    """
    if d < 3:
        raise ValueError("depth 3 or more is needed")
    ex = build_colored_example(d)
    ct = ex.tree
    action = GeneratedAction.from_permutations(ct.tree, ex.G_gens)
    failures = []
    perms = []
    halves = half_trees(ct.tree)
    for half in halves:
        for w in half_tree_fixing_witnesses(ct, half):
            if witness_hook is not None:
                w = witness_hook(half, w)
            reason = validate_half_tree_witness(action, half, w)
            if reason is not None:
                raise ValueError(f"witness for {half.edge} side {half.side} invalid: {reason}")
            if not is_color_preserving(ct, w):
                failures.append({"edge": list(half.edge), "side": half.side, "reason": "witness changes colors"})
            perms.append(w.as_permutation())
    inner = ct.tree.interior

    def interior_orbits(gens):
        group = PermGroup(ct.tree.vertex_count, gens)
        return sorted(tuple(x for x in orb if x in inner) for orb in orbit_partition(group) if any(x in inner for x in orb))

    check_b = interior_orbits(perms) == interior_orbits(ex.C_gens)
    return ColoredReport(d, not failures, check_b, len(perms), len(halves), failures)


def off_color_leaf_transposition(ct: ColoredTruncatedTree, half: HalfTree) -> tuple | None:
    """Two sibling boundary leaves of different colors on the moving side of ``half``."""
    tree = ct.tree
    moving = half_tree_vertices(tree.tree, half.complement())
    for x in sorted(moving):
        leaves = [w for w in tree.tree.adjacency[x] if w in tree.boundary and w in moving and tree.depth[w] > tree.depth[x]]
        for i, a in enumerate(leaves):
            for b in leaves[i + 1:]:
                if ct.colors[a] != ct.colors[b]:
                    return a, b
    return None
