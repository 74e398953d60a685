import random

import networkx as nx
from hypothesis import given
from hypothesis import strategies as st

from arbor.canon import TreeForms, canonical_labeling, vertex_orbit_labels
from arbor.graphs import FiniteGraph, FiniteTree

from helpers import random_connected_graph, random_tree


def relabel(graph, perm):
    edges = frozenset((perm[u], perm[v]) for u, v in graph.edges)
    return type(graph)(graph.vertex_count, edges)


def to_nx(graph):
    g = nx.Graph()
    g.add_nodes_from(range(graph.vertex_count))
    g.add_edges_from(graph.edges)
    return g


graphs = st.builds(
    lambda n, p, seed: random_connected_graph(n, p, random.Random(seed)),
    st.integers(1, 9),
    st.floats(0.0, 0.6),
    st.integers(0, 10**6),
)


@given(graphs, st.randoms(use_true_random=False))
def test_canonical_form_is_relabelling_invariant(graph, rng):
    perm = list(range(graph.vertex_count))
    rng.shuffle(perm)
    assert canonical_labeling(graph)[0] == canonical_labeling(relabel(graph, perm))[0]


@given(graphs, graphs)
def test_canonical_forms_decide_isomorphism(a, b):
    same = canonical_labeling(a)[0] == canonical_labeling(b)[0]
    assert same == (a.vertex_count == b.vertex_count and nx.is_isomorphic(to_nx(a), to_nx(b)))


@given(graphs)
def test_orbit_labels_match_automorphism_orbits(graph):
    _, labels = vertex_orbit_labels(graph)
    g = to_nx(graph)
    orbit_of = {}
    for auto in nx.algorithms.isomorphism.GraphMatcher(g, g).isomorphisms_iter():
        for v, w in auto.items():
            orbit_of.setdefault(v, set()).add(w)
    for v in range(graph.vertex_count):
        assert {w for w in range(graph.vertex_count) if labels[w] == labels[v]} == orbit_of[v]


def test_triangle_has_one_orbit():
    tri = FiniteGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    assert len(set(vertex_orbit_labels(tri)[1])) == 1


@given(st.integers(2, 25), st.integers(0, 10**6))
def test_branch_forms_decide_rooted_isomorphism(n, seed):
    tree = random_tree(n, random.Random(seed))
    forms = TreeForms(tree)
    g = to_nx(tree)
    for a, b in tree.sorted_edges[:4]:
        for c, d in tree.sorted_edges[:4]:
            ga = g.subgraph(_side(g, a, b))
            gc = g.subgraph(_side(g, c, d))
            ga = nx.relabel_nodes(ga, {b: "root"})
            gc = nx.relabel_nodes(gc, {d: "root"})
            nx.set_node_attributes(ga, {v: v == "root" for v in ga}, "r")
            nx.set_node_attributes(gc, {v: v == "root" for v in gc}, "r")
            iso = nx.is_isomorphic(ga, gc, node_match=lambda x, y: x["r"] == y["r"])
            assert (forms.branch(a, b) == forms.branch(c, d)) == iso
            if iso:
                m = forms.isomorphism(a, b, c, d)
                assert all(tree.has_edge(m[x], m[y]) for x, y in tree.edges if x in m and y in m)


def _side(g, parent, child):
    h = g.copy()
    h.remove_edge(parent, child)
    return nx.node_connected_component(h, child)


def test_colored_forms_distinguish_colors():
    tree = FiniteTree.from_edges(3, [(0, 1), (0, 2)])
    forms = TreeForms(tree, colors=(0, 1, 2))
    assert forms.branch(0, 1) != forms.branch(0, 2)
