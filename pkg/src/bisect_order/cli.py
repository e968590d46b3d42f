"""Command-line pipelines: convert, reorder, eval.

Reports go to standard output, artifacts to files, logs to standard
error. Every command writes a JSON manifest next to its main output with
enough information to reproduce the run bit for bit. Exit codes: 0 on
success, 1 on runtime failure, 2 on usage errors (including missing input
files).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import bfs_order, minhash_order, natural_order, random_order
from .bgraph import (
    load_edge_list,
    load_postings,
    read_labels,
    read_snapshot,
    to_bipartite_per_edge,
    to_bipartite_per_vertex,
    write_labels,
    write_snapshot,
)
from .bisection import InitStrategy
from .codecs import CODEC_NAMES
from .metrics import build_report
from .permutation import (
    read_permutation_text,
    write_permutation_binary,
    write_permutation_text,
)
from .reorder import ReorderConfig, recursive_bisection

MODES = ("per-edge", "per-vertex", "postings")
ALGOS = ("bp", "natural", "random", "bfs", "minhash")
THREADS_ENV = "BISECT_ORDER_THREADS"


class UsageError(Exception):
    pass


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _require_file(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"input file not found: {p}")
    return p


def _write_manifest(path: Path, command: str, args: dict, inputs: dict, outputs: list):
    manifest = {
        "tool": "bisect-order",
        "version": __version__,
        "command": command,
        "args": args,
        "inputs": inputs,
        "outputs": outputs,
        "numpy_version": np.__version__,
        "python_version": sys.version.split()[0],
    }
    with open(path, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return manifest


def _default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


# --- convert ----------------------------------------------------------------


def cmd_convert(args) -> int:
    src = _require_file(args.input)
    out = Path(args.output)
    if args.mode == "postings":
        graph = load_postings(src, min_list_len=args.min_len)
    else:
        plain = load_edge_list(src, directed=args.directed)
        if args.mode == "per-edge":
            graph = to_bipartite_per_edge(plain)
        else:
            graph = to_bipartite_per_vertex(plain)
    write_snapshot(graph, out)
    write_labels(graph.data_labels, f"{out}.labels")
    _write_manifest(
        Path(f"{out}.manifest.json"),
        "convert",
        {
            "mode": args.mode,
            "directed": args.directed,
            "min_len": args.min_len,
        },
        {"input": str(src), "sha256": _sha256(src)},
        [str(out), f"{out}.labels"],
    )
    print(
        json.dumps(
            {
                "snapshot": str(out),
                "mode": args.mode,
                "num_queries": graph.num_queries,
                "num_data": graph.num_data,
                "num_edges": graph.num_edges,
            }
        )
    )
    return 0


# --- reorder ----------------------------------------------------------------


def _resolve_init(name: str, snapshot: Path) -> InitStrategy:
    """'auto' picks random for graph reductions and minhash for postings."""
    if name != "auto":
        return InitStrategy(name)
    manifest_path = Path(f"{snapshot}.manifest.json")
    mode = None
    if manifest_path.is_file():
        try:
            with open(manifest_path) as f:
                mode = json.load(f).get("args", {}).get("mode")
        except (OSError, json.JSONDecodeError):
            mode = None
    return InitStrategy.MINHASH if mode == "postings" else InitStrategy.RANDOM


def cmd_reorder(args) -> int:
    snap_path = _require_file(args.snapshot)
    labels_path = Path(f"{snap_path}.labels")
    labels = read_labels(labels_path) if labels_path.is_file() else None
    graph = read_snapshot(snap_path, data_labels=labels)
    out = Path(args.output)

    start = time.perf_counter()
    if args.algo == "bp":
        init = _resolve_init(args.init, snap_path)
        config = ReorderConfig(
            init_strategy=init,
            max_iters=args.max_iters,
            depth_cutoff=args.depth,
            seed=args.seed,
            threads=args.threads,
        )
        perm = recursive_bisection(graph, config)
        init_name = init.value
    elif args.algo == "natural":
        perm = natural_order(graph)
        init_name = None
    elif args.algo == "random":
        perm = random_order(graph.num_data, args.seed)
        init_name = None
    elif args.algo == "bfs":
        perm = bfs_order(graph)
        init_name = None
    else:
        perm = minhash_order(graph, seed=args.seed)
        init_name = None
    elapsed = time.perf_counter() - start

    write_permutation_text(perm, out, labels=graph.data_labels)
    write_permutation_binary(perm, f"{out}.bin")
    _write_manifest(
        Path(f"{out}.manifest.json"),
        "reorder",
        {
            "algo": args.algo,
            "init": init_name,
            "max_iters": args.max_iters,
            "depth": args.depth,
            "seed": args.seed,
            "threads": args.threads,
        },
        {"snapshot": str(snap_path), "sha256": _sha256(snap_path)},
        [str(out), f"{out}.bin"],
    )
    print(
        json.dumps(
            {
                "permutation": str(out),
                "algo": args.algo,
                "num_data": graph.num_data,
                "wall_time_s": round(elapsed, 3),
            }
        )
    )
    return 0


# --- eval -------------------------------------------------------------------


def cmd_eval(args) -> int:
    snap_path = _require_file(args.snapshot)
    labels_path = Path(f"{snap_path}.labels")
    labels = read_labels(labels_path) if labels_path.is_file() else None
    graph = read_snapshot(snap_path, data_labels=labels)

    plain = None
    if args.edges:
        plain = load_edge_list(_require_file(args.edges), directed=args.directed)

    codecs = tuple(c for c in args.codecs.split(",") if c) if args.codecs else ()
    for c in codecs:
        if c not in CODEC_NAMES:
            raise UsageError(f"unknown codec {c!r} (choose from {', '.join(CODEC_NAMES)})")

    results = []
    for perm_path in args.perms:
        p = _require_file(perm_path)
        perm = read_permutation_text(p, labels=graph.data_labels)
        report = build_report(
            graph,
            perm,
            codecs=codecs,
            plain=plain,
            include_list_metadata=args.include_metadata,
        )
        entry = {"permutation": str(p)}
        entry.update(report.to_json_dict())
        results.append(entry)

    payload = {
        "snapshot": str(snap_path),
        "num_queries": graph.num_queries,
        "num_data": graph.num_data,
        "num_edges": graph.num_edges,
        "log_edge_set": (
            ("directed" if plain.directed else "undirected") if plain else None
        ),
        "results": results,
    }
    print(json.dumps(payload, indent=2))

    if args.tsv:
        cols = ["permutation", "loggap_total", "loggap_avg", "log_avg"] + [
            f"bits_{c}" for c in codecs
        ]
        with open(args.tsv, "w") as f:
            f.write("\t".join(cols) + "\n")
            for entry in results:
                row = [
                    entry["permutation"],
                    str(entry["loggap_total"]),
                    f"{entry['loggap_avg']:.6f}",
                    "" if entry["log_avg"] is None else f"{entry['log_avg']:.6f}",
                ] + [f"{entry['bits_per_edge'][c]:.6f}" for c in codecs]
                f.write("\t".join(row) + "\n")
    return 0


# --- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bisect-order",
        description="Compression-friendly reordering of graphs and inverted indexes.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="build a bipartite snapshot from text input")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--mode", choices=MODES, required=True)
    p.add_argument("--directed", action="store_true", help="edge list is directed")
    p.add_argument(
        "--min-len", type=int, default=0, help="skip posting lists shorter than this"
    )
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("reorder", help="compute a data-vertex permutation")
    p.add_argument("snapshot")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--algo", choices=ALGOS, default="bp")
    p.add_argument(
        "--init",
        choices=("auto", "random", "natural", "bfs", "minhash"),
        default="auto",
        help="bisection initialization (auto: by snapshot mode)",
    )
    p.add_argument("--max-iters", type=int, default=20)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--threads", type=int, default=_default_threads())
    p.set_defaults(func=cmd_reorder)

    p = sub.add_parser("eval", help="score permutations against a snapshot")
    p.add_argument("snapshot")
    p.add_argument("perms", nargs="+", help="permutation text files")
    p.add_argument("--edges", help="original edge list, enables the Log column")
    p.add_argument("--directed", action="store_true", help="edge list is directed")
    p.add_argument(
        "--codecs",
        default="",
        help=f"comma-separated codecs ({', '.join(CODEC_NAMES)})",
    )
    p.add_argument("--include-metadata", action="store_true")
    p.add_argument("--tsv", help="also write a TSV table to this path")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        _log(f"error: {e}")
        return 2
    except (ValueError, OSError) as e:
        _log(f"error: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
