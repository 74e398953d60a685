import random

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from arbor.graphs import (
    FiniteGraph,
    FiniteTree,
    HalfTree,
    MultiEdge,
    MultiGraph,
    TruncatedTree,
    block_cut_tree,
    block_cut_tree_to_dot,
    graph_to_dot,
    half_tree_vertices,
    horocycle_partition,
    horocycles_to_dot,
    is_path,
    project_to_path,
    tree_geodesic,
)
from arbor.primitivity import tree_of_triangles
from arbor.regular import build_truncated_regular_tree

from helpers import path_tree, random_connected_graph, random_tree, star
from oracles import check_block_cut, cutvertex_oracle, literal_horocycles, to_nx


trees = st.builds(lambda n, seed: random_tree(n, random.Random(seed)), st.integers(1, 30), st.integers(0, 10**6))


# --- construction ---------------------------------------------------------


def test_graph_rejects_loops_duplicates_and_out_of_range():
    with pytest.raises(ValueError):
        FiniteGraph.from_edges(3, [(1, 1)])
    with pytest.raises(ValueError):
        FiniteGraph.from_edges(3, [(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        FiniteGraph.from_edges(3, [(0, 3)])


def test_adjacency_is_symmetric():
    g = FiniteGraph.from_edges(4, [(0, 1), (1, 2), (3, 1)])
    for v in range(4):
        for w in g.adjacency[v]:
            assert v in g.adjacency[w]


def test_tree_rejects_cycles_and_disconnection():
    with pytest.raises(ValueError):
        FiniteTree.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    with pytest.raises(ValueError):
        FiniteTree.from_edges(4, [(0, 1), (2, 3)])


def test_multigraph_betti_number_counts_loops_and_parallel_edges():
    m = MultiGraph(2, (MultiEdge(0, (0, 1)), MultiEdge(1, (0, 1)), MultiEdge(2, (0,))))
    assert m.betti_number() == 2


def test_truncated_tree_detects_degree_deficit():
    tree = path_tree(5)
    with pytest.raises(ValueError):
        TruncatedTree(tree, 2, 2, interior_degree=3)
    t = TruncatedTree(tree, 2, 2, interior_degree=2)
    assert t.boundary == frozenset({0, 4})


# --- geodesics and projections -------------------------------------------


def test_geodesic_on_a_path():
    assert tree_geodesic(path_tree(3), 0, 2) == [0, 1, 2]


@given(trees)
def test_geodesic_to_self_is_trivial(tree):
    for v in range(tree.vertex_count):
        assert tree_geodesic(tree, v, v) == [v]


def test_geodesic_length_matches_bfs_on_random_tree():
    tree = random_tree(12, random.Random(7))
    g = to_nx(tree)
    dist = dict(nx.all_pairs_shortest_path_length(g))
    for u in range(12):
        for v in range(12):
            path = tree_geodesic(tree, u, v)
            assert len(path) - 1 == dist[u][v]
            assert is_path(tree, path)


def test_geodesic_rejects_unknown_vertex():
    with pytest.raises(KeyError):
        tree_geodesic(path_tree(3), 0, 5)


def test_projection_onto_star_path():
    assert project_to_path(star(3), [1, 0, 2], 3) == 0


def test_projection_rejects_non_path():
    with pytest.raises(ValueError):
        project_to_path(star(3), [1, 2], 3)


@given(trees, st.data())
def test_projection_is_the_unique_nearest_path_vertex(tree, data):
    n = tree.vertex_count
    u = data.draw(st.integers(0, n - 1))
    v = data.draw(st.integers(0, n - 1))
    path = tree_geodesic(tree, u, v)
    for x in range(n):
        p = project_to_path(tree, path, x)
        dists = [tree.distance(x, y) for y in path]
        assert dists.count(min(dists)) == 1
        assert tree.distance(x, p) == min(dists)
        for y in path:
            assert p in tree_geodesic(tree, x, y)
        if x in path:
            assert p == x


# --- half-trees -------------------------------------------------------------


def test_half_tree_on_a_path():
    assert half_tree_vertices(path_tree(4), HalfTree((1, 2), 1)) == {0, 1}


def test_half_tree_rejects_non_edge():
    with pytest.raises(ValueError):
        half_tree_vertices(path_tree(4), HalfTree((0, 2), 0))


@given(trees)
def test_half_trees_partition_the_vertices(tree):
    for e in tree.sorted_edges:
        a = half_tree_vertices(tree, HalfTree(e, e[0]))
        b = half_tree_vertices(tree, HalfTree(e, e[1]))
        assert a and b and not (a & b)
        assert a | b == set(range(tree.vertex_count))


def test_half_tree_sizes_at_central_edge_of_cubic_ball():
    t = build_truncated_regular_tree(3, 3)
    assert t.vertex_count == 22
    sizes = sorted(len(half_tree_vertices(t.tree, HalfTree((0, 1), s))) for s in (0, 1))
    # BFS component count: the neighbour's side holds 1 + 2 + 4 vertices.
    assert sizes == [7, 15]


# --- block-cut trees ----------------------------------------------------------


def test_two_triangles_sharing_a_vertex():
    g = FiniteGraph.from_edges(5, [(0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (0, 4)])
    bct = block_cut_tree(g)
    assert bct.cut_vertices == (0,)
    assert sorted(map(sorted, bct.blocks)) == [[0, 1, 2], [0, 3, 4]]
    assert sorted(bct.as_tree().degree(v) for v in range(3)) == [1, 1, 2]


def test_complete_graph_is_one_block():
    g = FiniteGraph.from_edges(4, [(u, v) for u in range(4) for v in range(u + 1, 4)])
    bct = block_cut_tree(g)
    assert len(bct.blocks) == 1 and bct.cut_vertices == ()
    assert bct.as_tree().vertex_count == 1


def test_single_vertex_is_one_block():
    bct = block_cut_tree(FiniteGraph(1, frozenset()))
    assert bct.blocks == ((0,),) and bct.cut_vertices == ()


def test_block_cut_rejects_disconnected_graph():
    with pytest.raises(ValueError):
        block_cut_tree(FiniteGraph.from_edges(4, [(0, 1), (2, 3)]))


def test_tree_of_triangles_interior_vertices_are_cutvertices():
    w = tree_of_triangles(3)
    cuts = set(block_cut_tree(w.graph).cut_vertices)
    assert cuts == cutvertex_oracle(w.graph)
    assert set(w.interior) <= cuts
    check_block_cut(w.graph)


@given(st.integers(1, 25), st.floats(0.0, 0.3), st.integers(0, 10**6))
def test_block_cut_matches_oracles_on_random_graphs(n, p, seed):
    check_block_cut(random_connected_graph(n, p, random.Random(seed)))


# --- horocycles -------------------------------------------------------------


def test_line_horocycles_are_singletons():
    part = horocycle_partition(path_tree(10), list(range(10)))
    assert part.sizes() == [1] * 10


def test_cubic_ball_horocycle_sizes():
    t = build_truncated_regular_tree(3, 2)
    ray = tree_geodesic(t.tree, 0, max(t.boundary))
    part = horocycle_partition(t.tree, ray)
    assert part.sizes() == [1, 1, 2, 2, 4]
    assert {frozenset(c) for c in part.classes().values()} == literal_horocycles(t.tree, ray)


def test_horocycles_reject_non_path():
    with pytest.raises(ValueError):
        horocycle_partition(star(3), [1, 2])


@given(trees, st.data())
def test_horocycles_match_literal_definition(tree, data):
    n = tree.vertex_count
    u = data.draw(st.integers(0, n - 1))
    v = data.draw(st.integers(0, n - 1))
    ray = tree_geodesic(tree, u, v)
    part = horocycle_partition(tree, ray)
    assert {frozenset(c) for c in part.classes().values()} == literal_horocycles(tree, ray)
    assert len({part.level[x] for x in ray}) == len(ray)


# --- DOT export ---------------------------------------------------------------


def test_dot_exports_are_well_formed():
    g = FiniteGraph.from_edges(5, [(0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (0, 4)])
    dot = graph_to_dot(g)
    assert dot.startswith("graph X {") and dot.rstrip().endswith("}")
    assert dot.count("--") == 6
    bdot = block_cut_tree_to_dot(block_cut_tree(g))
    assert "shape=box" in bdot and "shape=circle" in bdot
    hdot = horocycles_to_dot(path_tree(3), horocycle_partition(path_tree(3), [0, 1, 2]))
    assert 'label="0:0"' in hdot
