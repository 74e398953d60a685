"""Independent brute-force oracles shared by the test modules."""

import networkx as nx

from arbor.graphs import FiniteGraph, FiniteTree, block_cut_tree, project_to_path


def to_nx(graph: FiniteGraph) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(graph.vertex_count))
    g.add_edges_from(graph.edges)
    return g


def cutvertex_oracle(graph: FiniteGraph) -> set[int]:
    g = to_nx(graph)
    out = set()
    for v in range(graph.vertex_count):
        h = g.copy()
        h.remove_node(v)
        if h.number_of_nodes() and not nx.is_connected(h):
            out.add(v)
    return out


def block_oracle(graph: FiniteGraph) -> set[frozenset]:
    """Edges related by lying on a common cycle (or being equal), as vertex sets."""
    edges = sorted(graph.edges)
    g = to_nx(graph)
    parent = {e: e for e in edges}

    def find(e):
        while parent[e] != e:
            e = parent[e]
        return e

    for cycle in nx.cycle_basis(g):
        cyc = [tuple(sorted((cycle[i], cycle[(i + 1) % len(cycle)]))) for i in range(len(cycle))]
        for e in cyc[1:]:
            parent[find(e)] = find(cyc[0])
    # cycle-basis unions are transitive through shared edges, which is exactly
    # the closure of "lie on a common cycle".
    classes: dict = {}
    for e in edges:
        classes.setdefault(find(e), set()).update(e)
    blocks = {frozenset(c) for c in classes.values()}
    blocks |= {frozenset({v}) for v in range(graph.vertex_count) if graph.degree(v) == 0}
    return blocks


def check_block_cut(graph: FiniteGraph):
    bct = block_cut_tree(graph)
    assert set(bct.cut_vertices) == cutvertex_oracle(graph)
    assert {frozenset(b) for b in bct.blocks} == block_oracle(graph)
    tree = bct.as_tree()
    assert tree.vertex_count == len(bct.blocks) + len(bct.cut_vertices)
    for c in bct.cut_vertices:
        assert len(bct.blocks_containing(c)) >= 2


def literal_horocycles(tree: FiniteTree, ray) -> set[frozenset]:
    """Group vertices by equality of d(., v_i) for all ray indices past every projection."""
    n = tree.vertex_count
    start = max(ray.index(project_to_path(tree, ray, x)) for x in range(n))
    sig = {x: tuple(tree.distance(x, ray[i]) - tree.distance(ray[start], ray[i]) for i in range(start, len(ray))) for x in range(n)}
    classes: dict = {}
    for x in range(n):
        classes.setdefault(sig[x], set()).add(x)
    return {frozenset(c) for c in classes.values()}


def nx_automorphism_count(tree: FiniteTree) -> int:
    return sum(1 for _ in nx.algorithms.isomorphism.GraphMatcher(to_nx(tree), to_nx(tree)).isomorphisms_iter())
