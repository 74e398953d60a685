"""The 6-regular tree with one bipartition class red and the other colored
c1, c2, c3: every half-tree has a nontrivial fixator, and at depth 3 the
group generated by half-tree fixators matches the color-preserving group.

Run: python demos/colored_example.py
"""

from arbor.regular import build_colored_example, verify_gplusplus_equals_color_group
from arbor.trees import half_tree_trichotomy, property_H_check


def main():
    ex = build_colored_example(3)
    ct = ex.tree
    print(f"colored ball of radius 3: {ct.tree.vertex_count} vertices")
    print(f"  neighbours of the red center: {ct.neighbor_colors(ct.tree.center)}")

    h = property_H_check(ex.action("G"), policy="witness")
    print(f"  every half-tree has a nontrivial fixator: {h.holds} ({len(h.statuses)} half-trees)")
    tri = half_tree_trichotomy(ex.action("G"), (0, 1), policy="witness")
    print(f"  trichotomy at the central edge: {tri.case}")

    report = verify_gplusplus_equals_color_group(3)
    print(f"  fixators preserve colors: {report.check_a}")
    print(f"  color-preserving generators are products of fixators: {report.check_b}")
    print(f"  verdict: {report.verdict}")


if __name__ == "__main__":
    main()
