"""Write every connected graph on 8 vertices, up to isomorphism, as graph6.

Every connected graph has a vertex whose removal leaves it connected, so
each one arises from a connected 7-vertex graph plus a new vertex joined to
a nonempty subset.  Duplicates are removed with networkx isomorphism tests
inside Weisfeiler-Lehman hash buckets.  The expected count is 11117.
"""

import itertools
import sys
from pathlib import Path

import networkx as nx

EXPECTED = 11117


def main(out: str = "tests/data/connected8.g6") -> int:
    bases = [g for g in nx.graph_atlas_g() if g.number_of_nodes() == 7 and nx.is_connected(g)]
    buckets: dict[str, list[nx.Graph]] = {}
    for base in bases:
        for k in range(1, 8):
            for subset in itertools.combinations(range(7), k):
                g = base.copy()
                g.add_edges_from((7, v) for v in subset)
                key = nx.weisfeiler_lehman_graph_hash(g, iterations=4)
                bucket = buckets.setdefault(key, [])
                if not any(nx.is_isomorphic(g, h) for h in bucket):
                    bucket.append(g)
    graphs = [g for key in sorted(buckets) for g in buckets[key]]
    if len(graphs) != EXPECTED:
        print(f"generated {len(graphs)} graphs, expected {EXPECTED}", file=sys.stderr)
        return 1
    with open(Path(out), "wb") as fh:
        for g in graphs:
            fh.write(nx.to_graph6_bytes(g, header=False))
    print(f"wrote {len(graphs)} graphs to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main(*sys.argv[1:]))
