"""Primitivity obstructions for actions on trees, and Jung-Watkins counts
for the tree of triangles.

Run: python demos/primitivity.py
"""

from arbor.primitivity import (
    SimonInstance,
    caterpillar_window,
    connectivity_one_orbital_search,
    jung_watkins_counts,
    primitivity_obstruction_search,
    simon_inequality_check,
    stabilizer_chain_along_axis,
    tree_of_triangles,
)


def main():
    host, group, shift = caterpillar_window(4)
    spine = range(9)
    print(f"caterpillar with spine 0..8: group of order {group.order()}")
    print(f"  distance lemma at (0, 2, 1): {simon_inequality_check(SimonInstance(host.tree, group, 0, 2, 1)).verified}")
    obstruction = primitivity_obstruction_search(host.tree, group, spine)
    print(f"  obstruction {obstruction.found}: {obstruction.conclusion} ({obstruction.cross_check})")
    chain = stabilizer_chain_along_axis(host, group, shift)
    print(f"  stabilizer chain along the spine: {chain.status}, m = {chain.m}, n = {chain.n}")

    window = tree_of_triangles(3)
    counts = jung_watkins_counts(window.graph, window.interior)
    print(f"tree of triangles, radius 3: {window.graph.vertex_count} vertices, {len(window.interior)} interior")
    print(f"  block counts constant on the interior: {counts.constant_on_interior}, {set(counts.counts.values())}")
    orbital = connectivity_one_orbital_search(window.generators, window.graph)
    print(f"  orbital graph of {orbital.pair} has {len(orbital.block_cut.cut_vertices)} cutvertices")


if __name__ == "__main__":
    main()
