"""Classify automorphisms, build a translation through an edge, and watch
commutators g h^n g^-1 h^-n converge to g on a growing region.

Run: python demos/translations.py
"""

from arbor.regular import RegularTreeMap, branch_swap, build_truncated_regular_tree, translation
from arbor.trees import GeneratedAction, classify, commutator_approximants, translation_through_edge


def main():
    host = build_truncated_regular_tree(3, 6)
    print(f"3-regular ball of radius 6: {host.vertex_count} vertices")

    for k in (1, 2, 3):
        cls = classify(translation(host, k))
        print(f"  translation of length {k}: {cls.kind}, length {cls.length}, axis {cls.axis[:5]}...")

    action = GeneratedAction(host, (translation(host, 1), RegularTreeMap(host, (1, 2), (0, 1, 2))))
    for e in [(0, 1), (1, 4), (5, 13)]:
        res = translation_through_edge(action, e)
        print(f"  through {e}: word '{res.word}', length {res.classification.length}")

    big = build_truncated_regular_tree(3, 8)
    report = commutator_approximants(branch_swap(big, (0,), 1, 2), translation(big, 1), (0, 1), 3)
    print("commutator approximants on the radius-8 ball:")
    for row in report.rows:
        print(f"  n={row.n}: agrees on {row.agreement} of {row.evaluable} evaluable vertices, predicted {row.claimed}")
    print(f"  predicted regions grow monotonically: {report.monotone}")


if __name__ == "__main__":
    main()
