"""Exact permutation groups given by generators.

Permutations are tuples of images over ``range(n)``.  Products follow
function composition: ``compose(p, q)`` applies ``q`` first, then ``p``.

Group services (order, membership, stabilizers) sit on a deterministic
Schreier-Sims stabilizer chain.  Every service is exact; when a group grows
past the configured cap a :class:`CapExceeded` is raised instead of
returning an approximation.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Sequence

from .graphs import FiniteGraph, edge_key

Perm = tuple

ENUMERATION_CAP = 10**5


def default_cap() -> int:
    return int(os.environ.get("ARBOR_CAP", 10**7))


class CapExceeded(RuntimeError):
    """A group (or an enumeration) is larger than the configured cap."""


def identity(n: int) -> Perm:
    return tuple(range(n))


def compose(p: Perm, q: Perm) -> Perm:
    return tuple(map(p.__getitem__, q))


def inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def is_identity(p: Perm) -> bool:
    return all(i == x for i, x in enumerate(p))


def from_cycles(n: int, *cycles: Sequence[int]) -> Perm:
    img = list(range(n))
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + type(cyc)(cyc[:1])):
            img[a] = b
    check_perm(img)
    return tuple(img)


def check_perm(p: Sequence[int]):
    if sorted(p) != list(range(len(p))):
        raise ValueError("not a permutation")


def cycle_string(p: Perm) -> str:
    seen, out = set(), []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc, j = [i], p[i]
        seen.add(i)
        while j != i:
            seen.add(j)
            cyc.append(j)
            j = p[j]
        out.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(out) or "()"


def _transversal(base_point, gens):
    trans = {base_point: None}
    queue = [base_point]
    for p in queue:
        for s in gens:
            q = s[p]
            if q not in trans:
                trans[q] = (s, p)
                queue.append(q)
    return trans


class _Chain:
    """A base and strong generating set with explicit coset transversals."""

    def __init__(self, degree: int, gens: Sequence[Perm], prefix: Sequence[int], cap: int):
        self.degree = degree
        ident = identity(degree)
        base = list(prefix)
        for g in gens:
            if all(g[b] == b for b in base):
                base.append(next(i for i in range(degree) if g[i] != i))
        gens_at = [[s for s in gens if all(s[b] == b for b in base[:i])] for i in range(len(base))]
        trans: list[dict | None] = [None] * len(base)
        self.base, self.gens_at, self.trans = base, gens_at, trans
        i = len(base) - 1
        while i >= 0:
            trans[i] = self._orbit(base[i], gens_at[i], ident)
            bound = 1
            for t in trans[i:]:
                bound *= len(t) if t is not None else 1
            if bound > cap:
                raise CapExceeded(f"group order exceeds cap {cap}")
            added = False
            for p, u in list(trans[i].items()):
                for s in gens_at[i]:
                    h = compose(self._inv(i, s[p]), compose(s, u))
                    if is_identity(h):
                        continue
                    residue, j = self.sift(h, i + 1)
                    if is_identity(residue):
                        continue
                    if j == len(base):
                        base.append(next(x for x in range(degree) if residue[x] != x))
                        gens_at.append([])
                        trans.append(None)
                    for lvl in range(i + 1, j + 1):
                        gens_at[lvl].append(residue)
                    i, added = j, True
                    break
                if added:
                    break
            if not added:
                i -= 1
        self._inverses = [{p: inverse(u) for p, u in t.items()} for t in trans]

    @staticmethod
    def _orbit(b, gens, ident):
        raw = _transversal(b, gens)
        out = {b: ident}
        for q, link in raw.items():
            if link is not None:
                s, p = link
                out[q] = compose(s, out[p])
        return out

    def _inv(self, level, point):
        inv_cache = getattr(self, "_inverses", None)
        if inv_cache is not None:
            return inv_cache[level][point]
        return inverse(self.trans[level][point])

    def sift(self, g: Perm, start: int = 0) -> tuple[Perm, int]:
        for lvl in range(start, len(self.base)):
            p = g[self.base[lvl]]
            t = self.trans[lvl]
            if p not in t:
                return g, lvl
            g = compose(self._inv(lvl, p), g)
        return g, len(self.base)

    def order(self, start: int = 0) -> int:
        out = 1
        for t in self.trans[start:]:
            out *= len(t)
        return out

    def level_generators(self, level: int) -> list[Perm]:
        if level >= len(self.base):
            return []
        return list(self.gens_at[level])

    def elements(self, start: int = 0) -> Iterator[Perm]:
        ident = identity(self.degree)
        levels = [list(t.values()) for t in self.trans[start:]]
        if not levels:
            yield ident
            return
        for combo in product(*levels):
            g = ident
            for u in combo:
                g = compose(g, u)
            yield g

    def random_element(self, rng, start: int = 0) -> Perm:
        g = identity(self.degree)
        for t in self.trans[start:]:
            keys = sorted(t)
            g = compose(g, t[keys[rng.randrange(len(keys))]])
        return g


class PermGroup:
    """A permutation group on ``range(degree)`` given by generators."""

    def __init__(self, degree: int, generators: Iterable[Sequence[int]] = (), cap: int | None = None):
        self.degree = degree
        self.cap = default_cap() if cap is None else cap
        gens: list[Perm] = []
        for g in generators:
            g = tuple(g)
            if len(g) != degree:
                raise ValueError(f"generator of length {len(g)} on a domain of size {degree}")
            check_perm(g)
            if not is_identity(g) and g not in gens:
                gens.append(g)
        self.generators = tuple(gens)
        self._lock = threading.RLock()
        self._chains: dict[tuple, _Chain] = {}
        self._elements: list[Perm] | None = None

    def __repr__(self):
        return f"PermGroup(degree={self.degree}, generators=[{', '.join(map(cycle_string, self.generators))}])"

    @classmethod
    def symmetric(cls, n: int) -> "PermGroup":
        gens = []
        if n >= 2:
            gens.append(from_cycles(n, [0, 1]))
        if n >= 3:
            gens.append(from_cycles(n, list(range(n))))
        return cls(n, gens)

    def chain(self, prefix: Sequence[int] = ()) -> _Chain:
        key = tuple(prefix)
        with self._lock:
            if key not in self._chains:
                self._chains[key] = _Chain(self.degree, self.generators, key, self.cap)
            return self._chains[key]

    def order(self) -> int:
        return self.chain().order()

    def is_trivial(self) -> bool:
        return not self.generators

    def contains(self, g: Sequence[int]) -> bool:
        g = tuple(g)
        if len(g) != self.degree:
            raise ValueError("domain mismatch")
        residue, _ = self.chain().sift(g)
        return is_identity(residue)

    __contains__ = contains

    def elements(self, limit: int = ENUMERATION_CAP) -> list[Perm]:
        with self._lock:
            if self._elements is None:
                if self.order() > limit:
                    raise CapExceeded(f"enumeration of {self.order()} elements exceeds {limit}")
                self._elements = sorted(self.chain().elements())
            return self._elements

    def random_element(self, rng) -> Perm:
        return self.chain().random_element(rng)

    def orbit(self, x: int) -> list[int]:
        return sorted(_transversal(x, self.generators))

    def orbits(self) -> list[list[int]]:
        seen: set[int] = set()
        out = []
        for x in range(self.degree):
            if x not in seen:
                orb = self.orbit(x)
                seen.update(orb)
                out.append(orb)
        return out

    def is_transitive(self) -> bool:
        return self.degree <= 1 or len(self.orbit(0)) == self.degree

    def pointwise_stabilizer(self, points: Iterable[int]) -> "PermGroup":
        pts = tuple(sorted(set(points)))
        self._check_points(pts)
        if self._elements is not None:
            fixed = [g for g in self._elements if all(g[p] == p for p in pts)]
            return _from_elements(self, fixed)
        ch = self.chain(pts)
        sub = PermGroup(self.degree, ch.level_generators(len(pts)), cap=self.cap)
        return sub

    def setwise_stabilizer(self, points: Iterable[int]) -> "PermGroup":
        pts = tuple(sorted(set(points)))
        self._check_points(pts)
        aset = set(pts)
        if self._elements is not None:
            return _from_elements(self, [g for g in self._elements if all(g[p] in aset for p in pts)])
        ch = self.chain(pts)
        k = len(pts)
        reps: list[Perm] = []

        def descend(level, g):
            if level == k:
                reps.append(g)
                return
            for u in ch.trans[level].values():
                h = compose(g, u)
                if h[ch.base[level]] in aset:
                    descend(level + 1, h)

        descend(0, identity(self.degree))
        sub = PermGroup(self.degree, reps + ch.level_generators(k), cap=self.cap)
        assert sub.order() == len(reps) * ch.order(k)
        return sub

    def stabilizer(self, points: Iterable[int], mode: str = "pointwise") -> "PermGroup":
        if mode == "pointwise":
            return self.pointwise_stabilizer(points)
        if mode == "setwise":
            return self.setwise_stabilizer(points)
        raise ValueError(f"unknown stabilizer mode {mode!r}")

    def _check_points(self, pts):
        for p in pts:
            if not (0 <= p < self.degree):
                raise ValueError(f"point {p} outside the domain")

    def is_subgroup_of(self, other: "PermGroup") -> bool:
        return all(other.contains(g) for g in self.generators)

    def same_group(self, other: "PermGroup") -> bool:
        return self.order() == other.order() and self.is_subgroup_of(other)

    def join(self, other: "PermGroup") -> "PermGroup":
        return PermGroup(self.degree, self.generators + other.generators, cap=self.cap)

    def to_dict(self) -> dict:
        return {"domain_size": self.degree, "generators": [list(g) for g in self.generators]}

    @classmethod
    def from_dict(cls, data: dict, cap: int | None = None) -> "PermGroup":
        return cls(int(data["domain_size"]), [tuple(g) for g in data["generators"]], cap=cap)


def _from_elements(parent: PermGroup, elements: list[Perm]) -> PermGroup:
    """Subgroup given by its full element list; generators picked greedily."""
    elements = sorted(elements)
    sub = PermGroup(parent.degree, cap=parent.cap)
    closure = {identity(parent.degree)}
    gens = []
    for g in elements:
        if g not in closure:
            gens.append(g)
            closure = _close(closure, gens)
    sub = PermGroup(parent.degree, gens, cap=parent.cap)
    sub._elements = elements
    return sub


def _close(current: set, gens: list[Perm]) -> set:
    out = set(current)
    queue = list(out)
    for x in queue:
        for g in gens:
            y = compose(g, x)
            if y not in out:
                out.add(y)
                queue.append(y)
    return out


def orbit_partition(group: PermGroup) -> list[list[int]]:
    return group.orbits()


def stabilizer(group: PermGroup, points: Iterable[int], mode: str = "pointwise") -> PermGroup:
    return group.stabilizer(points, mode)


def element_query(group: PermGroup, g: Sequence[int]) -> dict:
    g = tuple(g)
    if len(g) != group.degree:
        raise ValueError("domain mismatch")
    check_perm(g)
    return {"member": group.contains(g), "order_of_group": group.order()}


def pair_orbit(group: PermGroup, x: int, y: int) -> set[tuple[int, int]]:
    start = edge_key(x, y)
    seen = {start}
    queue = [start]
    for a, b in queue:
        for g in group.generators:
            e = edge_key(g[a], g[b])
            if e not in seen:
                seen.add(e)
                queue.append(e)
    return seen


def orbital_graph(group: PermGroup, x: int, y: int) -> FiniteGraph:
    if x == y:
        raise ValueError("orbital graphs need two distinct points")
    return FiniteGraph(group.degree, frozenset(pair_orbit(group, x, y)))


def minimal_block_system(group: PermGroup, a: int, b: int) -> list[list[int]]:
    """Finest G-invariant partition in which ``a`` and ``b`` share a class."""
    n = group.degree
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx == ry:
            return False
        if ry < rx:
            rx, ry = ry, rx
        parent[ry] = rx
        return True

    union(a, b)
    queue = [(a, b)]
    for x, y in queue:
        for g in group.generators:
            gx, gy = g[x], g[y]
            if find(gx) != find(gy):
                union(gx, gy)
                queue.append((gx, gy))
    classes: dict[int, list[int]] = {}
    for v in range(n):
        classes.setdefault(find(v), []).append(v)
    return sorted(classes.values())


def is_block_system(group: PermGroup, blocks: Sequence[Sequence[int]]) -> bool:
    block_of = {}
    for i, blk in enumerate(blocks):
        for v in blk:
            block_of[v] = i
    if sorted(block_of) != list(range(group.degree)):
        return False
    for g in group.generators:
        for blk in blocks:
            if len({block_of[g[v]] for v in blk}) != 1:
                return False
    return True


class InconsistentResult(AssertionError):
    """Two independent computations that must agree did not."""


@dataclass(frozen=True)
class PrimitivityCertificate:
    verdict: str  # "primitive" | "imprimitive" | "intransitive"
    block_system: tuple = ()
    seed_pair: tuple | None = None
    orbital_records: tuple = ()  # (suborbit representative, orbital graph connected)
    orbits: tuple = ()

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "block_system": [list(b) for b in self.block_system],
            "seed_pair": list(self.seed_pair) if self.seed_pair else None,
            "orbital_records": [{"y": y, "connected": c} for y, c in self.orbital_records],
            "orbits": [list(o) for o in self.orbits],
        }


def primitivity_by_blocks(group: PermGroup):
    """First nontrivial proper block system over seeds in lexicographic order, or None."""
    n = group.degree
    for x in range(n):
        for y in range(x + 1, n):
            blocks = minimal_block_system(group, x, y)
            if len(blocks) > 1:
                return blocks, (x, y)
    return None


def primitivity_by_orbitals(group: PermGroup, base: int = 0):
    """Connectivity of the orbital graph of {base, y}, one y per suborbit."""
    stab = group.pointwise_stabilizer([base])
    records = []
    for orb in stab.orbits():
        y = orb[0]
        if y == base:
            continue
        records.append((y, orbital_graph(group, base, y).is_connected()))
    return records


def is_primitive(group: PermGroup) -> PrimitivityCertificate:
    orbits = group.orbits()
    if len(orbits) > 1:
        return PrimitivityCertificate("intransitive", orbits=tuple(tuple(o) for o in orbits))
    by_blocks = primitivity_by_blocks(group)
    records = primitivity_by_orbitals(group) if group.degree > 1 else []
    orbital_primitive = all(c for _, c in records)
    if (by_blocks is None) != orbital_primitive:
        raise InconsistentResult(f"block search and orbital graphs disagree for {group!r}")
    if by_blocks is None:
        return PrimitivityCertificate("primitive", orbital_records=tuple(records))
    blocks, seed = by_blocks
    return PrimitivityCertificate(
        "imprimitive",
        block_system=tuple(tuple(b) for b in blocks),
        seed_pair=seed,
        orbital_records=tuple(records),
    )


def generated_by_point_stabilizers(group: PermGroup) -> dict:
    witness: list[Perm] = []
    for x in range(group.degree):
        for g in group.pointwise_stabilizer([x]).generators:
            if g not in witness:
                witness.append(g)
    sub = PermGroup(group.degree, witness, cap=group.cap)
    return {"holds": sub.order() == group.order(), "witness": witness}


def induced_action(group: PermGroup, points: Sequence[int]) -> tuple[PermGroup, list[int]]:
    """Action on an invariant subset, relabelled to 0..k-1."""
    order = sorted(points)
    index = {v: i for i, v in enumerate(order)}
    gens = []
    for g in group.generators:
        try:
            gens.append(tuple(index[g[v]] for v in order))
        except KeyError:
            raise ValueError("subset is not invariant under the group") from None
    return PermGroup(len(order), gens, cap=group.cap), order


def centralizer_elements(
    group: PermGroup,
    subgroup_gens: Sequence[Perm],
    limit: int = ENUMERATION_CAP,
    invariant_graph: FiniteGraph | None = None,
) -> list[Perm]:
    """Every non-identity element of ``group`` commuting with each of ``subgroup_gens``.

    Small groups are filtered element by element.  Otherwise candidates are
    built orbit by orbit of the subgroup: a centralizing permutation is fixed
    on an orbit by the image of one representative, so the search runs over
    representative images and keeps the candidates that lie in ``group``.
    A graph preserved by ``group`` prunes candidates that break adjacency.
    """
    n = group.degree
    gens = [tuple(s) for s in subgroup_gens if not is_identity(tuple(s))]
    if group.order() <= limit:
        return [g for g in group.elements(limit) if not is_identity(g)
                and all(compose(g, s) == compose(s, g) for s in gens)]
    sub = PermGroup(n, gens, cap=group.cap)
    orbits = sub.orbits()
    options: list[list[dict[int, int]]] = []
    for orb in orbits:
        rep = orb[0]
        choices = []
        for y in range(n):
            partial = _equivariant_extension(gens, rep, y)
            if partial is not None and len(partial) == len(orb):
                choices.append(partial)
        options.append(choices)
    found: list[Perm] = []
    image = [-1] * n
    used = [False] * n
    candidates = [0]

    def place(i):
        if i == len(orbits):
            candidates[0] += 1
            if candidates[0] > limit:
                raise CapExceeded(f"more than {limit} centralizer candidates")
            g = tuple(image)
            if not is_identity(g) and group.contains(g):
                found.append(g)
            return
        for choice in options[i]:
            if any(used[y] for y in choice.values()):
                continue
            if invariant_graph is not None and not _keeps_adjacency(invariant_graph, image, choice):
                continue
            for x, y in choice.items():
                image[x], used[y] = y, True
            place(i + 1)
            for x, y in choice.items():
                image[x], used[y] = -1, False

    place(0)
    return sorted(found)


def _equivariant_extension(gens, x, y) -> dict[int, int] | None:
    """The map ``s(p) -> s(c(p))`` grown from ``c(x) = y``, or None if inconsistent."""
    out = {x: y}
    queue = [x]
    for p in queue:
        for s in gens:
            q, w = s[p], s[out[p]]
            if q in out:
                if out[q] != w:
                    return None
            else:
                out[q] = w
                queue.append(q)
    if len(set(out.values())) != len(out):
        return None
    return out


def _keeps_adjacency(graph: FiniteGraph, image: list[int], choice: dict[int, int]) -> bool:
    adj = graph.adjacency
    for x, y in choice.items():
        for w in adj[x]:
            iw = choice.get(w, image[w])
            if iw >= 0 and not graph.has_edge(y, iw):
                return False
    return True
