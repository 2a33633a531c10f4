"""Command-line front end for the polarization toolkit.

Subcommands mirror the library pipeline: check an edge-list file, detect
communities, report modularity over time windows, solve domination
problems, and generate synthetic graphs. Exit codes: 0 success, 2 bad
arguments, 3 parse/format/IO failure, 4 infeasible coverage target.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .community import (
    Partition,
    detect_communities,
    load_partition,
    relabel_by_size,
    save_partition,
)
from .domination import (
    coverage_curve,
    domination_to_dict,
    greedy_pdds,
    group_spreaders,
    in_group_domination,
    infeasible_to_dict,
    network_domination_by_group,
    write_curve_csv,
    write_domination_csv,
    write_domination_json,
)
from .errors import (
    DegenerateModularityError,
    FormatError,
    InfeasibleCoverageError,
    ParseError,
    UndefinedModularityError,
)
from .graph import (
    IngestOptions,
    TemporalEdgeSet,
    build_directed_graph,
    exclude_interval,
    induced_subgraph,
    ingest_edge_list,
    slice_windows,
    underlying_undirected,
)
from .polarization import (
    modularity,
    window_series,
    write_report_csv,
    write_report_json,
)
from .synth import FAMILIES, GeneratorSpec, generate

EXIT_OK = 0
EXIT_ARGUMENT = 2
EXIT_FORMAT = 3
EXIT_INFEASIBLE = 4


def _add_ingest_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="edge-list file (source,target,timestamp)")
    p.add_argument("--delimiter", default=",", help="field separator (default ',')")
    p.add_argument("--header", action="store_true", help="skip the first line")
    p.add_argument("--strict", action="store_true",
                   help="fail on the first malformed record instead of counting it")


def _add_exclusion_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--exclude-from", type=int, default=None, metavar="EPOCH",
                   help="start of an interval of arcs to drop (inclusive)")
    p.add_argument("--exclude-to", type=int, default=None, metavar="EPOCH",
                   help="end of the dropped interval (exclusive)")


def _load_edges(args: argparse.Namespace) -> TemporalEdgeSet:
    options = IngestOptions(
        delimiter=args.delimiter,
        skip_header=args.header,
        strict=args.strict,
    )
    with open(args.input, "r", encoding="utf-8") as fh:
        edges = ingest_edge_list(fh, options)
    if getattr(args, "exclude_from", None) is not None or getattr(args, "exclude_to", None) is not None:
        if args.exclude_from is None or args.exclude_to is None:
            raise ValueError("--exclude-from and --exclude-to must be given together")
        edges = exclude_interval(edges, args.exclude_from, args.exclude_to)
    return edges


def _load_partition_file(path: str, edges: TemporalEdgeSet) -> Partition:
    with open(path, "r", encoding="utf-8") as fh:
        return load_partition(fh, edges.labels)


def _resolve_groups(tokens: list[str], part: Partition) -> list[int]:
    """Map group selectors (indices or names) to indices, keeping order."""
    names = {name: i for i, name in part.group_meta.items()}
    picked: list[int] = []
    for token in tokens:
        for piece in token.split(","):
            piece = piece.strip()
            if not piece:
                continue
            if piece in names:
                picked.append(names[piece])
                continue
            try:
                i = int(piece)
            except ValueError:
                known = ", ".join(sorted(names)) if names else "none"
                raise ValueError(
                    f"unknown group {piece!r}; known names: {known}; indices run 0..{part.k - 1}"
                ) from None
            if not (0 <= i < part.k):
                raise ValueError(f"group index {i} out of range (k={part.k})")
            picked.append(i)
    seen: set[int] = set()
    result = [i for i in picked if not (i in seen or seen.add(i))]
    if not result:
        raise ValueError("no groups selected")
    return result


def _config_dict(args: argparse.Namespace) -> dict:
    cfg = {}
    for key, value in sorted(vars(args).items()):
        if key == "func" or callable(value):
            continue
        cfg[key] = value
    return cfg


def cmd_ingest_check(args: argparse.Namespace) -> int:
    edges = _load_edges(args)
    print(f"vertices: {edges.n_vertices}")
    print(f"arcs: {edges.n_arcs}")
    print(f"self-loops dropped: {edges.dropped_self_loops}")
    print(f"malformed lines: {edges.malformed_lines}")
    span = edges.time_span()
    if span is None:
        print("time span: empty")
    else:
        print(f"time span: {span[0]} .. {span[1]}")
    return EXIT_OK


def cmd_communities(args: argparse.Namespace) -> int:
    edges = _load_edges(args)
    und = underlying_undirected(build_directed_graph(edges))
    part = relabel_by_size(
        detect_communities(und, resolution=args.resolution, seed=args.seed)
    )
    q = modularity(und, part)
    print(f"groups: {part.k}")
    print(f"modularity: {q:.6f}")
    for i in range(min(part.k, args.top)):
        print(f"group {i}: {int(part.group_sizes[i])} vertices")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            save_partition(part, fh, edges.labels)
        print(f"partition written to {args.out}")
    return EXIT_OK


def cmd_polarization(args: argparse.Namespace) -> int:
    edges = _load_edges(args)
    part = _load_partition_file(args.partition, edges)
    windows = slice_windows(edges, args.window_seconds, origin=args.window_origin)
    tracked = _resolve_groups(args.groups, part) if args.groups else []
    report = window_series(edges, part, windows, tracked_groups=tracked)

    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            if args.format == "csv":
                write_report_csv(report, fh)
            else:
                write_report_json(report, fh, extra={"config": _config_dict(args)})
        print(f"windows: {len(report.windows)}")
        for name, trend in sorted(report.trends.items()):
            print(f"trend {name}: slope {trend.slope:+.6f} per window")
        print(f"report written to {args.out}")
    else:
        if args.format == "csv":
            write_report_csv(report, sys.stdout)
        else:
            write_report_json(report, sys.stdout, extra={"config": _config_dict(args)})
    return EXIT_OK


def _dominate_tasks(args: argparse.Namespace, g, part: Partition | None):
    """Yield (name, payload_kind, payload) for every requested run."""
    if args.mode == "unrestricted":
        group_list: list[int | None] = [None]
    else:
        if part is None:
            raise ValueError(f"--mode {args.mode} requires --partition")
        if not args.groups:
            raise ValueError(f"--mode {args.mode} requires --groups")
        group_list = list(_resolve_groups(args.groups, part))

    for i in group_list:
        slug = "all" if i is None else f"g{i}"
        if args.curve:
            if i is None:
                curve = coverage_curve(g, max_spreaders=args.max_spreaders)
            elif args.mode == "network-by-group":
                cand = group_spreaders(g, part, i)
                curve = coverage_curve(g, candidates=cand, max_spreaders=args.max_spreaders)
            else:
                members = part.members(i)
                cand = group_spreaders(g, part, i)
                sub, gids = induced_subgraph(g, members)
                local = np.searchsorted(gids, cand)
                curve = coverage_curve(sub, candidates=local, max_spreaders=args.max_spreaders)
            yield f"curve_{args.mode}_{slug}", "curve", curve
            continue
        for rho in args.rho:
            name = f"dominate_{args.mode}_{slug}_rho{rho:g}"
            try:
                if i is None:
                    result = greedy_pdds(g, rho)
                elif args.mode == "network-by-group":
                    result = network_domination_by_group(g, part, i, rho)
                else:
                    result = in_group_domination(g, part, i, rho)
            except InfeasibleCoverageError as err:
                yield name, "infeasible", (err, rho)
                continue
            yield name, "result", result


def _write_infeasible_csv(err: InfeasibleCoverageError, fh, labels) -> None:
    fh.write("step,vertex,covered,fraction\n")
    for j, (v, c) in enumerate(zip(err.selected, err.covered_after_step), start=1):
        name = labels[v] if labels is not None else str(v)
        frac = c / err.n_target if err.n_target else 0.0
        fh.write(f"{j},{name},{c},{frac:.6f}\n")
    fh.write(f"# infeasible: {err}\n")


def _write_dominate_file(path: Path, kind, payload, args, labels) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if args.format == "csv":
            if kind == "curve":
                write_curve_csv(payload, fh)
            elif kind == "result":
                write_domination_csv(payload, fh, labels)
            else:
                _write_infeasible_csv(payload[0], fh, labels)
        else:
            if kind == "curve":
                doc = {"curve": [{"spreaders": c, "fraction": f} for c, f in payload]}
            elif kind == "result":
                doc = domination_to_dict(payload, labels)
            else:
                doc = infeasible_to_dict(payload[0], payload[1], labels)
            doc["config"] = _config_dict(args)
            write_domination_json(doc, fh)


def _task_summary(name: str, kind, payload) -> str:
    if kind == "curve":
        final = payload[-1][1] if payload else 0.0
        return f"{name}: {len(payload)} points, final fraction {final:.4f}"
    if kind == "result":
        return (
            f"{name}: {len(payload.selected)} spreaders cover "
            f"{payload.covered}/{payload.n_target} ({payload.fraction:.4f})"
        )
    err = payload[0]
    frac = err.max_coverable / err.n_target if err.n_target else 0.0
    return (
        f"{name}: INFEASIBLE, candidate pool covers at most "
        f"{err.max_coverable}/{err.n_target} ({frac:.4f})"
    )


def cmd_dominate(args: argparse.Namespace) -> int:
    rhos = args.rho if args.rho else [1.0]
    for rho in rhos:
        if not (0.0 < rho <= 1.0):
            raise ValueError(f"rho must be in (0, 1], got {rho}")
    args.rho = rhos
    edges = _load_edges(args)
    g = build_directed_graph(edges)
    part = _load_partition_file(args.partition, edges) if args.partition else None
    labels = edges.labels

    out_dir = Path(args.out) if args.out else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)

    tasks = list(_dominate_tasks(args, g, part))
    any_infeasible = any(kind == "infeasible" for _, kind, _ in tasks)

    if out_dir is not None:
        for name, kind, payload in tasks:
            _write_dominate_file(out_dir / f"{name}.{args.format}", kind, payload, args, labels)
            print(_task_summary(name, kind, payload))
    elif args.format == "json":
        doc_tasks = []
        for name, kind, payload in tasks:
            if kind == "curve":
                doc = {"curve": [{"spreaders": c, "fraction": f} for c, f in payload]}
            elif kind == "result":
                doc = domination_to_dict(payload, labels)
            else:
                doc = infeasible_to_dict(payload[0], payload[1], labels)
            doc["name"] = name
            doc_tasks.append(doc)
        json.dump({"config": _config_dict(args), "tasks": doc_tasks}, sys.stdout,
                  indent=2, sort_keys=True)
        sys.stdout.write("\n")
    else:
        for name, kind, payload in tasks:
            sys.stdout.write(f"# {name}\n")
            if kind == "curve":
                write_curve_csv(payload, sys.stdout)
            elif kind == "result":
                write_domination_csv(payload, sys.stdout, labels)
            else:
                _write_infeasible_csv(payload[0], sys.stdout, labels)
    return EXIT_INFEASIBLE if any_infeasible else EXIT_OK


def _int_list(text: str) -> list[int]:
    return [int(piece) for piece in text.split(",") if piece.strip()]


def cmd_synth(args: argparse.Namespace) -> int:
    params: dict = {}
    base = None
    if args.family == "planted-partition":
        if args.blocks is None or args.p_in is None or args.p_out is None:
            raise ValueError("planted-partition requires --blocks, --p-in and --p-out")
        params = {"block_sizes": _int_list(args.blocks), "p_in": args.p_in, "p_out": args.p_out}
    elif args.family == "configuration-model":
        if args.input is None:
            raise ValueError("configuration-model requires --input (the graph to rewire)")
        with open(args.input, "r", encoding="utf-8") as fh:
            edges = ingest_edge_list(fh, IngestOptions())
        base = underlying_undirected(build_directed_graph(edges))
        if args.swaps is not None:
            params = {"swaps": args.swaps}
    elif args.family == "star":
        if args.leaves is None:
            raise ValueError("star requires --leaves")
        params = {"n_leaves": args.leaves}
    elif args.family == "directed-cycle":
        if args.n is None:
            raise ValueError("directed-cycle requires --n")
        params = {"n": args.n}
    elif args.family == "disjoint-cliques":
        if args.sizes is None:
            raise ValueError("disjoint-cliques requires --sizes")
        params = {"sizes": _int_list(args.sizes)}

    output = generate(GeneratorSpec(family=args.family, parameters=params, seed=args.seed), base)

    n_arcs = len(output.arc_pairs)
    if args.days > 0:
        rng = np.random.default_rng([args.seed, 1])
        stamps = rng.integers(0, args.days * 86400, size=n_arcs)
    else:
        stamps = np.zeros(n_arcs, dtype=np.int64)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    labels = output.vertex_labels
    edges_path = out_dir / "edges.csv"
    with open(edges_path, "w", encoding="utf-8") as fh:
        for (s, t), stamp in zip(output.arc_pairs.tolist(), stamps.tolist()):
            fh.write(f"{labels[s]},{labels[t]},{stamp}\n")
    written = [str(edges_path)]
    if output.partition is not None:
        part_path = out_dir / "partition.csv"
        with open(part_path, "w", encoding="utf-8") as fh:
            save_partition(output.partition, fh, labels)
        written.append(str(part_path))
    print(f"family: {args.family}")
    print(f"vertices: {output.n}")
    print(f"arcs: {n_arcs}")
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarnet",
        description="Polarization and domination analysis for directed interaction networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest-check", help="validate an edge-list file and print a summary")
    _add_ingest_args(p)
    p.set_defaults(func=cmd_ingest_check)

    p = sub.add_parser("communities", help="detect communities and write a partition file")
    _add_ingest_args(p)
    _add_exclusion_args(p)
    p.add_argument("--out", default=None, help="partition file to write")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--resolution", type=float, default=1.0)
    p.add_argument("--top", type=int, default=10, help="how many group sizes to print")
    p.set_defaults(func=cmd_communities)

    p = sub.add_parser("polarization", help="per-window modularity and group shares")
    _add_ingest_args(p)
    _add_exclusion_args(p)
    p.add_argument("--partition", required=True, help="partition file from 'communities'")
    p.add_argument("--out", default=None, help="report file (stdout when omitted)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--window-seconds", type=int, default=86400)
    p.add_argument("--window-origin", type=int, default=0)
    p.add_argument("--groups", action="append", default=None, metavar="GROUP",
                   help="track these groups (index or name; repeatable, comma-splittable)")
    p.set_defaults(func=cmd_polarization)

    p = sub.add_parser("dominate", help="greedy partial dominating sets")
    _add_ingest_args(p)
    _add_exclusion_args(p)
    p.add_argument("--partition", default=None, help="partition file (needed for group modes)")
    p.add_argument("--mode", choices=("unrestricted", "network-by-group", "in-group"),
                   default="unrestricted")
    p.add_argument("--groups", action="append", default=None, metavar="GROUP")
    p.add_argument("--rho", action="append", type=float, default=None,
                   help="coverage fraction in (0, 1]; repeatable (default 1.0)")
    p.add_argument("--curve", action="store_true",
                   help="emit a coverage curve instead of solving for --rho")
    p.add_argument("--max-spreaders", type=int, default=10,
                   help="curve length when --curve is given")
    p.add_argument("--out", default=None, help="directory for per-task output files")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_dominate)

    p = sub.add_parser("synth", help="generate a synthetic graph with known structure")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--out", required=True, help="directory for edges.csv (+ partition.csv)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--days", type=int, default=0,
                   help="spread timestamps uniformly over this many days (default: all zero)")
    p.add_argument("--blocks", default=None, help="planted-partition block sizes, e.g. 100,100")
    p.add_argument("--p-in", type=float, default=None, dest="p_in")
    p.add_argument("--p-out", type=float, default=None, dest="p_out")
    p.add_argument("--input", default=None, help="base graph for configuration-model")
    p.add_argument("--swaps", type=int, default=None, help="accepted swaps for configuration-model")
    p.add_argument("--leaves", type=int, default=None, help="leaf count for star")
    p.add_argument("--n", type=int, default=None, help="vertex count for directed-cycle")
    p.add_argument("--sizes", default=None, help="disjoint-cliques sizes, e.g. 5,5,4")
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, FormatError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FORMAT
    except InfeasibleCoverageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, UndefinedModularityError, DegenerateModularityError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ARGUMENT


def run() -> None:
    raise SystemExit(main())
