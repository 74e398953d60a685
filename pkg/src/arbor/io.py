"""Loading and saving the JSON file formats.

* graph: ``{"vertex_count": n, "edges": [[u, v], ...]}``
* group: ``{"domain_size": n, "generators": [[image array], ...]}``
* partial automorphism: ``{"host_ref": ref, "domain_radius": r, "map": [[v, image], ...]}``

``host_ref`` is either a path to a graph file holding a finite tree
(relative to the referring file) or a model window: ``regular:q:d``,
``line:R`` or ``colored:d``.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path
from typing import Any

from .graphs import FiniteGraph, FiniteTree, TruncatedTree
from .perm import PermGroup, check_perm
from .trees import PartialAutomorphism


class InputError(ValueError):
    """An input file or descriptor does not match its schema."""


def load_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def _require(data: Any, keys: tuple[str, ...], what: str) -> dict:
    if not isinstance(data, dict):
        raise InputError(f"{what}: expected a JSON object")
    missing = [k for k in keys if k not in data]
    if missing:
        raise InputError(f"{what}: missing field(s) {', '.join(missing)}")
    return data


def _int(x: Any, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise InputError(f"{what}: expected an integer, got {x!r}")
    return x


def _pairs(xs: Any, what: str) -> list[tuple[int, int]]:
    if not isinstance(xs, list):
        raise InputError(f"{what}: expected a list of pairs")
    out = []
    for p in xs:
        if not isinstance(p, list) or len(p) != 2:
            raise InputError(f"{what}: expected a pair, got {p!r}")
        out.append((_int(p[0], what), _int(p[1], what)))
    return out


def graph_from_dict(data: Any, tree: bool = False, what: str = "graph") -> FiniteGraph:
    _require(data, ("vertex_count", "edges"), what)
    n = _int(data["vertex_count"], what)
    edges = _pairs(data["edges"], what)
    try:
        graph = FiniteGraph.from_edges(n, edges)
        return FiniteTree.from_graph(graph) if tree else graph
    except ValueError as exc:
        raise InputError(f"{what}: {exc}") from exc


def group_from_dict(data: Any, degree: int | None = None, cap: int | None = None, what: str = "group") -> PermGroup:
    _require(data, ("domain_size", "generators"), what)
    n = _int(data["domain_size"], what)
    if degree is not None and n != degree:
        raise InputError(f"{what}: domain size {n} does not match {degree} vertices")
    gens = data["generators"]
    if not isinstance(gens, list):
        raise InputError(f"{what}: generators must be a list")
    perms = []
    for g in gens:
        if not isinstance(g, list):
            raise InputError(f"{what}: generator must be an image array")
        perm = tuple(_int(x, what) for x in g)
        if len(perm) != n:
            raise InputError(f"{what}: generator of length {len(perm)}, expected {n}")
        try:
            check_perm(perm)
        except ValueError as exc:
            raise InputError(f"{what}: {exc}") from exc
        perms.append(perm)
    return PermGroup(n, perms, cap=cap)


def resolve_host(ref: str, base: Path | None = None) -> TruncatedTree:
    from .regular import build_colored_example, build_line_window, build_truncated_regular_tree

    if not isinstance(ref, str) or not ref:
        raise InputError("host_ref must be a non-empty string")
    kind, _, rest = ref.partition(":")
    try:
        if kind == "regular":
            q, d = (int(x) for x in rest.split(":"))
            return build_truncated_regular_tree(q, d)
        if kind == "line":
            return build_line_window(int(rest))
        if kind == "colored":
            return build_colored_example(int(rest)).tree.tree
    except ValueError as exc:
        raise InputError(f"bad host_ref {ref!r}: {exc}") from exc
    path = Path(ref)
    if base is not None and not path.is_absolute():
        path = base / path
    return TruncatedTree.whole(graph_from_dict(load_json(path), tree=True, what=str(path)))


def aut_from_dict(data: Any, base: Path | None = None, host: TruncatedTree | None = None) -> PartialAutomorphism:
    what = "partial automorphism"
    _require(data, ("map",), what)
    if host is None:
        _require(data, ("host_ref",), what)
        host = resolve_host(data["host_ref"], base)
    pairs = _pairs(data["map"], what)
    n = host.vertex_count
    if any(not (0 <= v < n and 0 <= w < n) for v, w in pairs):
        raise InputError(f"{what}: vertex outside the host's 0..{n - 1}")
    if len({v for v, _ in pairs}) != len(pairs):
        raise InputError(f"{what}: vertex mapped twice")
    try:
        aut = PartialAutomorphism.from_pairs(host, pairs)
        aut.validate()
    except ValueError as exc:
        raise InputError(f"{what}: {exc}") from exc
    return aut


def load_graph(path, tree: bool = False) -> FiniteGraph:
    return graph_from_dict(load_json(path), tree=tree, what=str(path))


def load_group(path, degree: int | None = None, cap: int | None = None) -> PermGroup:
    return group_from_dict(load_json(path), degree=degree, cap=cap, what=str(path))


def load_aut(path, host: TruncatedTree | None = None) -> PartialAutomorphism:
    path = Path(path)
    return aut_from_dict(load_json(path), base=path.parent, host=host)


def to_jsonable(obj: Any) -> Any:
    """Plain JSON data for reports: ``to_dict`` where available, tuples and sets as sorted lists."""
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj) if not f.name.startswith("_")}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return sorted(to_jsonable(x) for x in obj)
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"
