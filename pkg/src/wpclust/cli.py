"""Batch command-line front end.

Subcommands: gen, normalize, height, dist, matrix, cluster, cut, pca,
scan-triangle, bench.  Every run logs its resolved configuration and seed to
stderr, embeds tool version and configuration in its output files, writes
files atomically, and is deterministic given flags, seed, and inputs (at any
--threads value).

Exit status: 0 success, 2 usage error, 1 computation error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time

import numpy as np

from . import __version__
from .cluster import (
    LINKAGES,
    adjusted_rand_index,
    agglomerate,
    cut as cut_dendrogram,
    dendrogram_to_newick,
    distance_matrix,
)
from .core import normalize_rational
from .datasets import MODULI_WEIGHTS, gen_moduli_points, gen_synthetic_clusters
from .dissimilarity import (
    DissimilarityOptions,
    RationalScanOptions,
    chord_distance,
    dissimilarity,
    dissimilarity_rational,
    triangle_violation_scan,
)
from .finsler import GeodesicOptions, geodesic_distance, geodesic_distance_rational
from .io import (
    MalformedInputError,
    atomic_write_text,
    load_dendrogram,
    load_matrix,
    load_points,
    save_dendrogram,
    save_labels,
    save_matrix,
    save_points,
    write_json,
)
from .core import weighted_height
from .pca import normalize_dataset, weighted_pca

log = logging.getLogger("wpclust")

METRICS = (
    "chord",
    "dissimilarity",
    "finsler",
    "rational-dissimilarity",
    "rational-finsler",
)


class UsageError(Exception):
    """Bad flag combination or input/metric mismatch; maps to exit 2."""


def _parse_space(text: str):
    try:
        return tuple(int(tok) for tok in text.replace(",", " ").split())
    except ValueError as exc:
        raise UsageError(f"--space must be a list of integers, got {text!r}") from exc


def _run_meta(command: str, args: argparse.Namespace) -> dict:
    config = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in ("func", "command", "threads") and v is not None
    }
    meta = {"tool": "wpclust", "version": __version__, "command": command, "config": config}
    log.info("%s config: %s (threads=%s)", command, config, getattr(args, "threads", 1))
    return meta


def _geodesic_options(args: argparse.Namespace) -> GeodesicOptions:
    return GeodesicOptions(
        segments=args.segments,
        max_iters=args.iters,
        multistarts=args.multistarts,
        seed=args.seed,
    )


def _make_metric(name: str, kind: str, args: argparse.Namespace):
    """Oracle (point, point) -> float, checked against the point kind."""
    if name not in METRICS:
        raise UsageError(f"unknown metric {name!r}; expected one of {METRICS}")
    rational = name.startswith("rational-")
    if rational != (kind == "rational"):
        raise UsageError(f"metric {name!r} requires {'rational' if rational else 'complex'} points")
    if name == "chord":
        return chord_distance
    if name == "dissimilarity":
        opts = DissimilarityOptions(seed=args.seed)
        return lambda a, b: dissimilarity(a, b, opts)
    if name == "finsler":
        opts = _geodesic_options(args)
        return lambda a, b: geodesic_distance(a, b, opts).distance
    if name == "rational-dissimilarity":
        opts = RationalScanOptions(height_bound=args.height_bound)
        return lambda a, b: dissimilarity_rational(a, b, opts)
    opts = _geodesic_options(args)
    return lambda a, b: geodesic_distance_rational(a, b, opts).distance


def _load_points_for_metric(path: str, metric: str, args: argparse.Namespace):
    kind, weights, points = load_points(path)
    if kind == "rational" and metric.startswith("rational-"):
        points = [normalize_rational(p) for p in points]
    return kind, weights, points


def _add_metric_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--metric", required=True, choices=METRICS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--segments", type=int, default=16, help="geodesic path segments")
    p.add_argument("--iters", type=int, default=500, help="geodesic descent iteration cap")
    p.add_argument("--multistarts", type=int, default=3)
    p.add_argument("--height-bound", type=int, default=50, help="rational scan bound")


def cmd_gen(args: argparse.Namespace) -> int:
    meta = _run_meta("gen", args)
    if args.moduli_count is not None:
        if args.space is not None and _parse_space(args.space) != MODULI_WEIGHTS:
            raise UsageError(f"moduli generation is fixed to weights {MODULI_WEIGHTS}")
        ds = gen_moduli_points(args.moduli_count, args.height_bound, args.seed)
    else:
        if args.space is None:
            raise UsageError("--space is required (e.g. --space 2,1)")
        ds = gen_synthetic_clusters(
            _parse_space(args.space), args.clusters, args.per_cluster, args.spread, args.seed
        )
    save_points(args.out, ds.points[0].weights, ds.points, extra=meta | {"meta": ds.meta})
    if args.labels_out:
        save_labels(args.labels_out, ds.labels)
    print(f"wrote {len(ds.points)} points to {args.out}")
    return 0


def cmd_normalize(args: argparse.Namespace) -> int:
    meta = _run_meta("normalize", args)
    kind, weights, points = load_points(args.input)
    if args.mode == "geometric" and kind != "complex":
        raise UsageError("geometric normalization requires complex points")
    if args.mode == "rational" and kind != "rational":
        raise UsageError("rational normalization requires rational points")
    out_points = normalize_dataset(points, args.mode)
    save_points(args.out, weights, out_points, extra=meta)
    print(f"wrote {len(out_points)} normalized points to {args.out}")
    return 0


def cmd_height(args: argparse.Namespace) -> int:
    _run_meta("height", args)
    kind, _, points = load_points(args.input)
    if kind != "rational":
        raise UsageError("heights are defined for rational points")
    lines = ["index,height"]
    for i, p in enumerate(points):
        lines.append("%d,%.17g" % (i, weighted_height(p)))
    text = "\n".join(lines) + "\n"
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_dist(args: argparse.Namespace) -> int:
    meta = _run_meta("dist", args)
    kind, _, points = _load_points_for_metric(args.input, args.metric, args)
    n = len(points)
    if not (0 <= args.i < n and 0 <= args.j < n):
        raise UsageError(f"indices must be in [0, {n})")
    pa, pb = points[args.i], points[args.j]
    extra: dict = {}
    if args.metric in ("finsler", "rational-finsler"):
        if args.metric == "finsler":
            if kind != "complex":
                raise UsageError("metric 'finsler' requires complex points")
            res = geodesic_distance(pa, pb, _geodesic_options(args))
        else:
            if kind != "rational":
                raise UsageError("metric 'rational-finsler' requires rational points")
            res = geodesic_distance_rational(pa, pb, _geodesic_options(args))
        value = res.distance
        extra = {
            "converged": res.converged,
            "iterations": res.iterations,
            "path": {
                "re": [list(row.real) for row in res.path.nodes],
                "im": [list(row.imag) for row in res.path.nodes],
            },
        }
    else:
        oracle = _make_metric(args.metric, kind, args)
        value = oracle(pa, pb)
    print("%.17g" % value)
    if args.out:
        write_json(args.out, meta | {"value": value} | extra)
    return 0


def cmd_matrix(args: argparse.Namespace) -> int:
    meta = _run_meta("matrix", args)
    kind, _, points = _load_points_for_metric(args.input, args.metric, args)
    oracle = _make_metric(args.metric, kind, args)
    matrix = distance_matrix(points, oracle, parallelism=args.threads)
    save_matrix(args.out, matrix, extra=meta)
    print(f"wrote {matrix.n}x{matrix.n} matrix to {args.out}")
    return 0


def cmd_cluster(args: argparse.Namespace) -> int:
    meta = _run_meta("cluster", args)
    matrix = load_matrix(args.input)
    dendro = agglomerate(matrix, args.linkage)
    save_dendrogram(args.out, dendro, extra=meta)
    if args.newick:
        atomic_write_text(args.newick, dendrogram_to_newick(dendro) + "\n")
    if args.cut_k is not None or args.cut_height is not None:
        labels = cut_dendrogram(dendro, k=args.cut_k, height=args.cut_height)
        if not args.partition_out:
            raise UsageError("--partition-out is required when cutting")
        save_labels(args.partition_out, labels)
    print(f"wrote dendrogram over {dendro.n_leaves} leaves to {args.out}")
    return 0


def cmd_cut(args: argparse.Namespace) -> int:
    _run_meta("cut", args)
    dendro = load_dendrogram(args.input)
    labels = cut_dendrogram(dendro, k=args.k, height=args.height)
    save_labels(args.out, labels)
    print(f"wrote partition with {int(labels.max()) + 1} clusters to {args.out}")
    return 0


def cmd_pca(args: argparse.Namespace) -> int:
    meta = _run_meta("pca", args)
    kind, _, points = load_points(args.input)
    if kind != "complex":
        raise UsageError("pca requires complex points")
    result = weighted_pca(points, args.k, center=not args.no_center)
    obj = meta | {
        "k": result.k,
        "eigenvalues": [float(v) for v in result.eigenvalues],
        "components": [
            {"re": list(row.real), "im": list(row.imag)} for row in result.components
        ],
        "projections": [
            {"re": list(row.real), "im": list(row.imag)} for row in result.projected
        ],
        "mean": {"re": list(result.mean.real), "im": list(result.mean.imag)},
    }
    write_json(args.out, obj)
    print(f"wrote top-{result.k} weighted PCA to {args.out}")
    return 0


def cmd_scan_triangle(args: argparse.Namespace) -> int:
    meta = _run_meta("scan-triangle", args)
    kind, _, points = _load_points_for_metric(args.input, args.metric, args)
    oracle = _make_metric(args.metric, kind, args)
    report = triangle_violation_scan(points, oracle, trials=args.trials, seed=args.seed)
    write_json(args.out, meta | report.to_json_dict())
    print(
        "scanned %d triples: max ratio %.6g, %d violations"
        % (report.trials, report.max_ratio, len(report.violations))
    )
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    meta = _run_meta("bench", args)
    names = [m.strip() for m in args.metrics.split(",") if m.strip()]
    for name in names:
        if name.startswith("rational-"):
            raise UsageError("bench generates complex points; rational metrics unsupported")
    space = _parse_space(args.space)
    per = -(-args.n // args.clusters)
    ds = gen_synthetic_clusters(space, args.clusters, per, args.spread, args.seed)
    points = ds.points[: args.n]
    expected_evals = args.n * (args.n - 1) // 2

    per_metric: dict[str, dict] = {}
    partitions: dict[str, np.ndarray] = {}
    for name in names:
        oracle = _make_metric(name, "complex", args)
        calls = [0]

        def counted(a, b, _oracle=oracle, _calls=calls):
            _calls[0] += 1
            return _oracle(a, b)

        t0 = time.perf_counter()
        matrix = distance_matrix(points, counted, parallelism=args.threads)
        elapsed = time.perf_counter() - t0
        dendro = agglomerate(matrix, "single")
        partitions[name] = cut_dendrogram(dendro, k=args.cut_k)
        per_metric[name] = {
            "seconds": elapsed,
            "evaluations": calls[0],
            "expected_evaluations": expected_evals,
        }

    agreement = {}
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            agreement[f"{a}|{b}"] = adjusted_rand_index(partitions[a], partitions[b])
    write_json(args.out, meta | {"metrics": per_metric, "agreement": agreement})
    for name in names:
        print(
            "%s: %d evaluations in %.3fs"
            % (name, per_metric[name]["evaluations"], per_metric[name]["seconds"])
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wpclust",
        description="Scaling-invariant distances and hierarchical clustering "
        "on weighted projective point sets.",
    )
    parser.add_argument("--version", action="version", version=f"wpclust {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic point set")
    p.add_argument("--space", help="weights, e.g. 2,1 or 2,4,6,10")
    p.add_argument("--clusters", type=int, default=3)
    p.add_argument("--per-cluster", type=int, default=30)
    p.add_argument("--spread", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--moduli-count", type=int, help="generate moduli points instead")
    p.add_argument("--height-bound", type=int, default=3)
    p.add_argument("--out", required=True)
    p.add_argument("--labels-out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("normalize", help="canonically normalize a point set")
    p.add_argument("--mode", required=True, choices=("geometric", "rational"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("height", help="weighted heights of rational points")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_height)

    p = sub.add_parser("dist", help="distance between two stored points")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--out")
    _add_metric_flags(p)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("matrix", help="pairwise distance matrix")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int, default=1)
    _add_metric_flags(p)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("cluster", help="agglomerate a distance matrix")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--linkage", required=True, choices=LINKAGES)
    p.add_argument("--cut-k", type=int)
    p.add_argument("--cut-height", type=float)
    p.add_argument("--partition-out")
    p.add_argument("--newick")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("cut", help="cut a stored dendrogram")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--height", type=float)
    p.set_defaults(func=cmd_cut)

    p = sub.add_parser("pca", help="weighted principal component analysis")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--no-center", action="store_true")
    p.set_defaults(func=cmd_pca)

    p = sub.add_parser("scan-triangle", help="triangle-inequality scan")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--trials", type=int, default=1000)
    _add_metric_flags(p)
    p.set_defaults(func=cmd_scan_triangle)

    p = sub.add_parser("bench", help="compare metric regimes on synthetic data")
    p.add_argument("--metrics", required=True, help="comma list, e.g. chord,finsler")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--space", default="2,1")
    p.add_argument("--clusters", type=int, default=3)
    p.add_argument("--spread", type=float, default=0.05)
    p.add_argument("--cut-k", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--segments", type=int, default=8)
    p.add_argument("--iters", type=int, default=60)
    p.add_argument("--multistarts", type=int, default=1)
    p.add_argument("--height-bound", type=int, default=50)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s", stream=sys.stderr)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (MalformedInputError, ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
