"""Command-line entry point: one subcommand per experiment.

Every subcommand also accepts ``--descriptor FILE``, a JSON object whose keys
mirror the flags (flags win).  ``arbor run FILE`` dispatches on the
descriptor's ``experiment`` field.  Reports are JSON on stdout, or written to
``--out`` with a plain-text summary next to it.

Exit codes: 0 completed and every check passed, 1 completed with a failure or
an inconclusive result, 2 input error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Callable

from . import __version__
from .graphs import (
    FiniteTree,
    TruncatedTree,
    block_cut_tree,
    block_cut_tree_to_dot,
    graph_to_dot,
    horocycle_partition,
    horocycles_to_dot,
)
from .io import InputError, dumps, load_aut, load_graph, load_group, load_json
from .perm import ENUMERATION_CAP, CapExceeded, default_cap, is_primitive
from .primitivity import (
    Inadmissible,
    SimonInstance,
    caterpillar_window,
    connectivity_one_orbital_search,
    jung_watkins_counts,
    primitivity_obstruction_search,
    simon_inequality_check,
    stabilizer_chain_along_axis,
    tree_of_triangles,
)
from .trees import (
    EXHAUSTIVE_CAP,
    GeneratedAction,
    Inconclusive,
    InvariantSubtree,
    PreconditionFailed,
    WordCapExhausted,
    classify,
    commutator_approximants,
    half_tree_trichotomy,
    point_stabilizer_generation,
    property_E_check,
    property_H_check,
    property_P_check,
    quotient_multigraph,
    translation_through_edge,
)

EXPERIMENTS: dict[str, Callable] = {}
ALIASES = {"tree_file": "tree", "group_file": "group", "graph_file": "graph", "aut_file": "aut"}
DEFAULTS = {"word_cap": 12, "policy": "exhaustive", "which": "G", "n_max": 3, "offset": 0, "threads": 1}


class Outcome:
    def __init__(self, status: str, result, dots: dict | None = None):
        self.status = status  # "pass" | "fail" | "inconclusive"
        self.result = result
        self.dots = dots or {}


def experiment(name: str):
    def register(fn):
        EXPERIMENTS[name] = fn
        return fn

    return register


def _passfail(ok: bool) -> str:
    return "pass" if ok else "fail"


# ---------------------------------------------------------------------------
# shared input handling


def _cap(args) -> int:
    return args.cap if args.cap is not None else default_cap()


def _tree(args) -> FiniteTree:
    if args.tree is None:
        raise InputError("--tree is required")
    return load_graph(args.tree, tree=True)


def _group(args, degree: int):
    if args.group is None:
        raise InputError("--group is required")
    return load_group(args.group, degree=degree, cap=_cap(args))


def _edge(args) -> tuple[int, int]:
    if args.edge is None:
        raise InputError("--edge is required")
    return tuple(args.edge)


def _action(args) -> GeneratedAction:
    """The group action under study, from an example name or from files."""
    from .regular import (
        LineMap,
        RegularTreeMap,
        build_colored_example,
        build_line_window,
        build_truncated_regular_tree,
        translation,
    )

    kw = {"word_cap": args.word_cap, "cap": args.cap or EXHAUSTIVE_CAP}
    if args.example == "colored":
        return build_colored_example(args.depth or 3).action(args.which, **kw)
    if args.example == "two-translations":
        host = build_truncated_regular_tree(3, args.radius or 6)
        return GeneratedAction(host, (translation(host, 1), RegularTreeMap(host, (1, 2), (0, 1, 2))), **kw)
    if args.example == "line-shift":
        host = build_line_window(args.radius or 10)
        return GeneratedAction(host, (LineMap(host, 1, 1),), **kw)
    if args.example is not None:
        raise InputError(f"unknown example {args.example!r}")
    tree = _tree(args)
    host = TruncatedTree.whole(tree)
    if args.auts:
        return GeneratedAction(host, tuple(load_aut(p, host=host) for p in args.auts), **kw)
    return GeneratedAction.from_group(tree, _group(args, tree.vertex_count), **kw)


# ---------------------------------------------------------------------------
# experiments


@experiment("classify")
def _classify(args):
    if args.aut is None:
        raise InputError("--aut is required")
    return Outcome("pass", classify(load_aut(args.aut)))


@experiment("property-e")
def _property_e(args):
    report = property_E_check(_action(args), _edge(args))
    return Outcome(_passfail(report.holds), report)


@experiment("property-p")
def _property_p(args):
    if not args.path:
        raise InputError("--path is required")
    report = property_P_check(_action(args), args.path)
    return Outcome(_passfail(report.holds), report)


@experiment("property-h")
def _property_h(args):
    report = property_H_check(_action(args), args.policy)
    return Outcome(_passfail(report.holds), report)


@experiment("trichotomy")
def _trichotomy(args):
    report = half_tree_trichotomy(_action(args), _edge(args), args.policy)
    return Outcome(_passfail(report.consistent), report)


@experiment("translation")
def _translation(args):
    e = _edge(args)
    try:
        res = translation_through_edge(_action(args), e)
    except InvariantSubtree as exc:
        return Outcome("fail", {"invariant_subtree": str(exc)})
    return Outcome(_passfail(res.classification.axis_contains_edge(e)), res)


@experiment("commutator")
def _commutator(args):
    from .regular import branch_swap, build_truncated_regular_tree, translation

    host = build_truncated_regular_tree(3, args.radius or 8)
    h = translation(host, 1)
    g = branch_swap(host, (0,), 1, 2)
    e = tuple(args.edge) if args.edge else (0, 1)
    report = commutator_approximants(g, h, e, args.n_max)
    return Outcome(_passfail(report.verified and report.monotone), report)


@experiment("colored6")
def _colored6(args):
    from .regular import build_colored_example, verify_gplusplus_equals_color_group

    depth = args.depth or 3
    report = verify_gplusplus_equals_color_group(depth)
    dots = {}
    if args.dot:
        ct = build_colored_example(depth).tree
        attrs = {v: {"color": ct.color_name(v)} for v in range(ct.tree.vertex_count)}
        dots["colored_ball.dot"] = graph_to_dot(ct.tree.tree, "colored", attrs)
    return Outcome(_passfail(report.check_a and report.check_b), report, dots)


@experiment("blocktree")
def _blocktree(args):
    if args.graph is None:
        raise InputError("--graph is required")
    graph = load_graph(args.graph)
    bct = block_cut_tree(graph)
    dots = {"graph.dot": graph_to_dot(graph), "blocktree.dot": block_cut_tree_to_dot(bct)}
    result = {"blocks": bct.blocks, "cut_vertices": bct.cut_vertices, "incidences": bct.incidences}
    return Outcome("pass", result, dots)


@experiment("horocycles")
def _horocycles(args):
    tree = _tree(args)
    if not args.ray:
        raise InputError("--ray is required")
    part = horocycle_partition(tree, args.ray)
    result = {"ray": part.ray, "level": part.level, "classes": part.classes(), "sizes": part.sizes()}
    return Outcome("pass", result, {"horocycles.dot": horocycles_to_dot(tree, part)})


@experiment("primitivity")
def _primitivity(args):
    if args.tree is None:
        group = load_group(args.group, cap=_cap(args)) if args.group else None
        if group is None:
            raise InputError("--group is required")
        return Outcome("pass", is_primitive(group))
    tree = _tree(args)
    group = _group(args, tree.vertex_count)
    if not args.v1:
        raise InputError("--v1 is required with --tree")
    report = primitivity_obstruction_search(tree, group, args.v1, offset=args.offset, workers=args.threads)
    return Outcome("pass", report)


@experiment("simon")
def _simon(args):
    tree = _tree(args)
    group = _group(args, tree.vertex_count)
    if None in (args.x, args.y, args.z):
        raise InputError("--x, --y and --z are required")
    try:
        inst = SimonInstance(tree, group, args.x, args.y, args.z)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    try:
        report = simon_inequality_check(inst)
    except Inadmissible as exc:
        return Outcome("fail", {"admissible": False, "reason": str(exc)})
    return Outcome(_passfail(report.verified), {"admissible": True, **report.to_dict()})


@experiment("axis-chain")
def _axis_chain(args):
    from .regular import build_truncated_regular_tree, translation
    from .trees import tree_aut_generators

    if args.example == "caterpillar":
        host, group, t = caterpillar_window(args.radius or 6)
    elif args.example == "regular":
        host = build_truncated_regular_tree(3, args.radius or 3)
        group = tree_aut_generators(host.tree, cap=_cap(args))
        t = translation(host, 1)
    else:
        tree = _tree(args)
        host = TruncatedTree.whole(tree)
        group = _group(args, tree.vertex_count)
        if args.aut is None:
            raise InputError("--aut is required")
        t = load_aut(args.aut, host=host)
    report = stabilizer_chain_along_axis(host, group, t)
    return Outcome("inconclusive" if report.status == "inconclusive" else "pass", report)


def _default_interior(graph) -> list[int]:
    """Vertices at distance at least the largest block diameter from the periphery."""
    bct = block_cut_tree(graph)
    margin = 0
    for block in bct.blocks:
        sub, _ = graph.induced(block)
        margin = max(margin, max(max(sub.bfs_distances(v)) for v in range(sub.vertex_count)))
    ecc = [max(graph.bfs_distances(v)) for v in range(graph.vertex_count)]
    periphery = [v for v in range(graph.vertex_count) if ecc[v] == max(ecc)]
    near = [min(graph.bfs_distances(p)[v] for p in periphery) for v in range(graph.vertex_count)]
    return [v for v in range(graph.vertex_count) if near[v] >= margin]


@experiment("jw-counts")
def _jw_counts(args):
    if args.example == "triangles":
        window = tree_of_triangles(args.radius or 3)
        graph, interior = window.graph, args.interior or window.interior
    else:
        if args.graph is None:
            raise InputError("--graph is required")
        graph = load_graph(args.graph)
        interior = args.interior or _default_interior(graph)
    report = jung_watkins_counts(graph, interior)
    return Outcome("pass", report, {"blocktree.dot": block_cut_tree_to_dot(block_cut_tree(graph))})


@experiment("orbital-search")
def _orbital_search(args):
    if args.example == "triangles":
        window = tree_of_triangles(args.radius or 3)
        graph, group = window.graph, window.generators
    else:
        if args.graph is None:
            raise InputError("--graph is required")
        graph = load_graph(args.graph)
        group = _group(args, graph.vertex_count)
    report = connectivity_one_orbital_search(group, graph, base=args.base or 0)
    dots = {"orbital.dot": graph_to_dot(report.orbital, "orbital")} if report.orbital else {}
    return Outcome("pass", report, dots)


@experiment("quotient")
def _quotient(args):
    tree = _tree(args)
    group = _group(args, tree.vertex_count)
    report = quotient_multigraph(tree, group)
    gen = point_stabilizer_generation(tree, group)
    agree = (report.betti_1 == 0) == gen["holds"]
    result = {"quotient": report, "generated_by_point_stabilizers": gen, "criterion_agrees": agree}
    return Outcome(_passfail(agree), result)


# ---------------------------------------------------------------------------
# argument parsing


def _int_list(s: str) -> list[int]:
    try:
        return [int(x) for x in s.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected integers, got {s!r}") from exc


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--descriptor", help="JSON descriptor; flags override its fields")
    p.add_argument("--out", help="write the JSON report here (and a .txt summary next to it)")
    p.add_argument("--dot", help="directory for DOT output")
    p.add_argument("--threads", type=int, help="worker threads (default 1)")
    p.add_argument("--cap", type=int, help="group-order cap (default: ARBOR_CAP or 10^7)")
    p.add_argument("--word-cap", type=int, help="word length cap for generated searches (default 12)")
    p.add_argument("--seed", type=int, help="seed for randomized generation (recorded in the report)")
    p.add_argument("--tree", help="tree file")
    p.add_argument("--graph", help="graph file")
    p.add_argument("--group", help="group file")
    p.add_argument("--aut", help="partial automorphism file")
    p.add_argument("--auts", nargs="+", help="partial automorphism files generating the action")
    p.add_argument("--example", help="built-in fixture instead of input files")
    p.add_argument("--which", choices=["G", "C"], help="colored example: partition- or color-preserving group")
    p.add_argument("--depth", type=int)
    p.add_argument("--radius", type=int)
    p.add_argument("--edge", type=int, nargs=2)
    p.add_argument("--path", type=int, nargs="+")
    p.add_argument("--ray", type=int, nargs="+")
    p.add_argument("--policy", choices=["exhaustive", "witness", "search"])
    p.add_argument("--n-max", type=int)
    p.add_argument("--v1", type=int, nargs="+")
    p.add_argument("--offset", type=int)
    p.add_argument("--interior", type=int, nargs="+")
    p.add_argument("--base", type=int)
    p.add_argument("--x", type=int)
    p.add_argument("--y", type=int)
    p.add_argument("--z", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arbor", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"arbor {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the experiment named in a descriptor")
    run.add_argument("descriptor_file")
    _add_common(run)
    for name, fn in EXPERIMENTS.items():
        _add_common(sub.add_parser(name, help=(fn.__doc__ or name).strip().split("\n")[0]))
    return parser


def _apply_descriptor(args, parser) -> None:
    path = args.descriptor_file if args.command == "run" else args.descriptor
    if path is None:
        args.experiment = args.command
    else:
        data = load_json(path)
        if not isinstance(data, dict):
            raise InputError("descriptor must be a JSON object")
        name = data.get("experiment", None if args.command == "run" else args.command)
        if isinstance(name, str):
            name = name.replace("_", "-")
        if args.command != "run" and name != args.command:
            raise InputError(f"descriptor is for {name!r}, not {args.command!r}")
        args.experiment = name
        base = Path(path).parent
        for key, value in data.items():
            if key == "experiment":
                continue
            dest = ALIASES.get(key, key).replace("-", "_")
            if not hasattr(args, dest) or dest in ("descriptor", "descriptor_file"):
                raise InputError(f"unknown descriptor field {key!r}")
            if getattr(args, dest) is None:
                if dest in ("tree", "graph", "group", "aut") and isinstance(value, str):
                    value = str(base / value)
                elif dest == "auts" and isinstance(value, list):
                    value = [str(base / v) for v in value]
                setattr(args, dest, value)
    if args.experiment not in EXPERIMENTS:
        raise InputError(f"unknown experiment {args.experiment!r}; valid: {', '.join(sorted(EXPERIMENTS))}")
    for key, value in DEFAULTS.items():
        if getattr(args, key) is None:
            setattr(args, key, value)


_NOT_DESCRIPTOR = {"command", "descriptor", "descriptor_file", "out", "dot", "experiment"}


def effective_descriptor(args) -> dict:
    out = {"experiment": args.experiment}
    for key, value in sorted(vars(args).items()):
        if key not in _NOT_DESCRIPTOR and value is not None:
            out[key] = value
    return out


def _summary(report: dict) -> str:
    lines = [f"arbor {report['version']}", f"experiment: {report['experiment']}", f"status: {report['status']}"]
    result = report.get("result")
    if isinstance(result, dict):
        for key in sorted(result):
            value = result[key]
            if isinstance(value, (bool, int, str)) or value is None:
                lines.append(f"{key}: {value}")
    if "error" in report:
        lines.append(f"error: {report['error']}")
    return "\n".join(lines) + "\n"


def _emit(report: dict, args, dots: dict) -> None:
    text = dumps(report)
    if args.out:
        out = Path(args.out)
        out.write_text(text)
        out.with_suffix(".txt").write_text(_summary(report))
    else:
        sys.stdout.write(text)
    if args.dot and dots:
        d = Path(args.dot)
        d.mkdir(parents=True, exist_ok=True)
        for name, body in sorted(dots.items()):
            (d / name).write_text(body)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_descriptor(args, parser)
    except InputError as exc:
        print(f"arbor: error: {exc}", file=sys.stderr)
        return 2
    report = {
        "experiment": args.experiment,
        "version": __version__,
        "descriptor": effective_descriptor(args),
        "caps": {
            "group_order": _cap(args),
            "enumeration": ENUMERATION_CAP,
            "exhaustive_search": args.cap or EXHAUSTIVE_CAP,
            "word_length": args.word_cap,
        },
    }
    dots: dict = {}
    try:
        outcome = EXPERIMENTS[args.experiment](args)
    except (InputError, PreconditionFailed) as exc:
        print(f"arbor: error: {exc}", file=sys.stderr)
        return 2
    except (CapExceeded, Inconclusive, WordCapExhausted) as exc:
        report.update(status="inconclusive", error=f"{type(exc).__name__}: {exc}")
    else:
        report.update(status=outcome.status, result=outcome.result)
        dots = outcome.dots
    _emit(report, args, dots)
    return 0 if report["status"] == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
