"""Command-line surface binding the library into reproducible runs.

Every subcommand is fully seeded and writes a deterministic document to
``--out``: identical invocations produce byte-identical files, and each
report records the flag set plus a fingerprint of its input files so a run
can be reproduced from the report alone.

Exit codes: 0 success (or check passed), 1 check failed, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import io as vio
from .distances import DistanceMetric, RayModel
from .geometry import ViewRecord
from .renderer import RenderConfig, l_macro, l_micro_pairwise, l_micro_variance, nerf_photometric_loss, render_image
from .scenes import SCENES, make_scene
from .selection import (
    RoundSchedule,
    approximation_ratio,
    brute_force_optimal,
    greedy_select,
    run_active_loop,
    select_with_strategy,
)
from .verify import (
    affine_law_battery,
    color_bound_battery,
    greedy_ratio_battery,
)

REPORT_VERSION = "1"

CLI_STRATEGIES = ("greedy-pixel", "greedy-semantic", "s-then-p", "p-then-s", "weighted", "fvs", "random")

DEFAULT_MODEL = RayModel(theta_low=0.0, theta_high=math.pi / 3, t1_len=1.0, t2_len=1.0)


def _metric_from_flag(name: str) -> DistanceMetric:
    if name == "euclidean":
        return DistanceMetric.euclidean()
    if name == "squared":
        return DistanceMetric.squared()
    raise ValueError(f"unknown metric {name!r}")


def _split_views(doc: vio.TransformsDocument, initial_ids: Sequence[str], features) -> tuple[list, list]:
    by_id = {v.id: v for v in doc.views}
    missing = [i for i in initial_ids if i not in by_id]
    if missing:
        raise ValueError(f"initial ids not present in transforms: {missing}")
    if features is not None:
        have = set(features)
        lost = [v.id for v in doc.views if v.id not in have]
        if lost:
            raise ValueError(f"embeddings missing for views: {lost}")

    def mk(v: ViewRecord, status: str) -> ViewRecord:
        feat = features[v.id] if features is not None else None
        return ViewRecord(id=v.id, pose=v.pose, feature=feat, status=status)

    initial = [mk(by_id[i], "training") for i in initial_ids]
    chosen = set(initial_ids)
    candidates = [mk(v, "candidate") for v in doc.views if v.id not in chosen]
    return initial, candidates


def _selection_rows(result, prefix: str = "") -> list:
    return [
        (f"{prefix}order", vio.fmt_seq(result.order)),
        (f"{prefix}separations", vio.fmt_seq(result.separations)),
        (f"{prefix}delta-tilde", vio.fmt(result.delta_tilde)),
    ]


def _write_check_report(out: str, command: str, flags: list, rows: list, passed: bool) -> int:
    # check instances are fully defined by their flags; fingerprint those
    flag_text = vio.flags_line(flags)
    digest = hashlib.sha256(flag_text.encode()).hexdigest()
    items = [
        ("viewplan-report", REPORT_VERSION),
        ("command", command),
        ("flags", flag_text),
        ("fingerprint", f"sha256:{digest}"),
        *rows,
        ("status", "pass" if passed else "fail"),
    ]
    vio.write_report(out, items)
    return 0 if passed else 1


def _cmd_select(args) -> int:
    doc = vio.parse_transforms(args.transforms)
    features = vio.parse_embeddings(args.embeddings) if args.embeddings else None
    initial_ids = args.initial.split(",")
    initial, candidates = _split_views(doc, initial_ids, features)

    result = select_with_strategy(
        args.strategy,
        initial,
        candidates,
        DEFAULT_MODEL,
        args.count,
        pixel_metric=_metric_from_flag(args.metric),
        lam=getattr(args, "lambda"),
        shortlist_k=args.shortlist,
        seed=args.seed,
    )
    inputs = [args.transforms] + ([args.embeddings] if args.embeddings else [])
    flags = _select_flags(args)
    items = [
        ("viewplan-report", REPORT_VERSION),
        ("command", "select"),
        ("flags", vio.flags_line(flags)),
        ("fingerprint", vio.fingerprint_files(inputs)),
        ("strategy", result.strategy),
        ("metric", result.metric),
        ("seed", vio.fmt(args.seed)),
        ("count", vio.fmt(args.count)),
        ("initial", vio.fmt_seq(initial_ids)),
        *_selection_rows(result),
        ("roster", vio.fmt_seq(list(initial_ids) + list(result.order))),
    ]
    vio.write_report(args.out, items)
    return 0


def _select_flags(args) -> list:
    pairs = [
        ("--transforms", args.transforms),
        ("--embeddings", args.embeddings),
        ("--initial", args.initial),
        ("--strategy", args.strategy),
        ("--lambda", getattr(args, "lambda")),
        ("--shortlist", args.shortlist),
        ("--count", getattr(args, "count", None)),
        ("--metric", args.metric),
        ("--seed", args.seed),
        ("--schedule", getattr(args, "schedule", None)),
        ("--round-embeddings", getattr(args, "round_embeddings", None)),
    ]
    out = []
    for flag, value in pairs:
        if value is None:
            continue
        out.extend([flag, vio.fmt(value)])
    return out


def _cmd_active_loop(args) -> int:
    doc = vio.parse_transforms(args.transforms)
    parts = args.schedule.split(",")
    if len(parts) != 3:
        raise ValueError("--schedule must be INIT,PER,ROUNDS")
    schedule = RoundSchedule(int(parts[0]), int(parts[1]), int(parts[2]))
    initial_ids = args.initial.split(",")

    needs_features = args.strategy in ("greedy-semantic", "s-then-p", "p-then-s", "weighted")
    features_per_round = None
    round_paths: list[str] = []
    if args.round_embeddings:
        round_paths = [
            args.round_embeddings.format(round=r + 1) for r in range(schedule.rounds)
        ]
        features_per_round = [vio.parse_embeddings(p) for p in round_paths]
    elif needs_features and args.embeddings:
        features_per_round = [vio.parse_embeddings(args.embeddings)] * schedule.rounds
        round_paths = [args.embeddings] * schedule.rounds if schedule.rounds else []
    elif needs_features:
        raise ValueError(f"strategy {args.strategy!r} requires --round-embeddings or --embeddings")

    base_features = vio.parse_embeddings(args.embeddings) if args.embeddings else None
    initial, candidates = _split_views(doc, initial_ids, base_features)

    loop = run_active_loop(
        schedule,
        args.strategy,
        initial,
        candidates,
        DEFAULT_MODEL,
        features_per_round=features_per_round,
        pixel_metric=_metric_from_flag(args.metric),
        lam=getattr(args, "lambda"),
        shortlist_k=args.shortlist,
        seed=args.seed,
    )
    inputs = [args.transforms] + ([args.embeddings] if args.embeddings else []) + sorted(set(round_paths))
    items = [
        ("viewplan-report", REPORT_VERSION),
        ("command", "active-loop"),
        ("flags", vio.flags_line(_select_flags(args))),
        ("fingerprint", vio.fingerprint_files(inputs)),
        ("strategy", args.strategy),
        ("metric", loop.rounds[0].metric if loop.rounds else args.metric),
        ("schedule", args.schedule),
        ("seed", vio.fmt(args.seed)),
        ("initial", vio.fmt_seq(initial_ids)),
    ]
    for idx, result in enumerate(loop.rounds, start=1):
        items.append(("round", vio.fmt(idx)))
        items.extend(_selection_rows(result))
    items.append(("roster", vio.fmt_seq(loop.roster)))
    vio.write_report(args.out, items)
    return 0


def _cmd_oracle(args) -> int:
    doc = vio.parse_transforms(args.transforms)
    features = vio.parse_embeddings(args.embeddings) if args.embeddings else None
    initial_ids = args.initial.split(",")
    initial, candidates = _split_views(doc, initial_ids, features)
    metric = _metric_from_flag(args.metric)

    oracle = brute_force_optimal(initial, candidates, metric, DEFAULT_MODEL, args.count)
    greedy = greedy_select(initial, candidates, metric, DEFAULT_MODEL, args.count)
    ratio = approximation_ratio(greedy, oracle)

    inputs = [args.transforms] + ([args.embeddings] if args.embeddings else [])
    flags = ["--transforms", args.transforms]
    if args.embeddings:
        flags += ["--embeddings", args.embeddings]
    flags += [
        "--initial", args.initial,
        "--count", str(args.count),
        "--metric", args.metric,
        "--seed", str(args.seed),
    ]
    items = [
        ("viewplan-report", REPORT_VERSION),
        ("command", "oracle"),
        ("flags", vio.flags_line(flags)),
        ("fingerprint", vio.fingerprint_files(inputs)),
        ("metric", args.metric),
        ("count", vio.fmt(args.count)),
        ("initial", vio.fmt_seq(initial_ids)),
        ("subset", vio.fmt_seq(sorted(oracle.subset))),
        ("delta-star", vio.fmt(oracle.delta_star)),
        ("evaluated-subsets", vio.fmt(oracle.evaluated_subsets)),
        *_selection_rows(greedy, prefix="greedy-"),
        ("ratio", vio.fmt(ratio)),
    ]
    vio.write_report(args.out, items)
    return 0


def _cmd_verify_lemma1(args) -> int:
    lo, hi = (float(x) for x in args.theta_band.split(","))
    model = RayModel(theta_low=lo, theta_high=hi, t1_len=args.t1, t2_len=args.t2)
    report = affine_law_battery(
        model,
        n_pairs=args.pairs,
        n_ray_pairs=args.ray_samples,
        n_quad=args.quad,
        seed=args.seed,
        tolerance=args.tol,
    )
    flags = [
        "--t1", vio.fmt(args.t1), "--t2", vio.fmt(args.t2),
        "--theta-band", args.theta_band, "--pairs", str(args.pairs),
        "--ray-samples", str(args.ray_samples), "--quad", str(args.quad),
        "--seed", str(args.seed), "--tol", vio.fmt(args.tol),
    ]
    rows = [
        ("expected-slope", vio.fmt(report.expected_slope)),
        ("slope", vio.fmt(report.slope)),
        ("intercept", vio.fmt(report.intercept)),
        ("r-squared", vio.fmt(report.r_squared)),
        ("relative-error", vio.fmt(report.relative_error)),
        ("tolerance", vio.fmt(report.tolerance)),
    ]
    rows += [("sample", f"{vio.fmt(d2)} {vio.fmt(est)}") for d2, est in report.samples]
    return _write_check_report(args.out, "verify-lemma1", flags, rows, report.passed)


def _cmd_verify_lemma2(args) -> int:
    report = greedy_ratio_battery(
        n_instances=args.instances, pool=args.pool, count=args.count, seed=args.seed
    )
    flags = [
        "--instances", str(args.instances), "--pool", str(args.pool),
        "--count", str(args.count), "--seed", str(args.seed),
    ]
    rows = [
        ("instances", vio.fmt(report.instances)),
        ("min-ratio", vio.fmt(report.min_ratio)),
        ("mean-ratio", vio.fmt(report.mean_ratio)),
        ("violations", vio.fmt(report.violations)),
    ]
    return _write_check_report(args.out, "verify-lemma2", flags, rows, report.passed)


def _cmd_verify_lemma3(args) -> int:
    scene = make_scene(args.scene)
    report = color_bound_battery(
        scene, n_pairs=args.pairs, seed=args.seed, n_samples=args.samples
    )
    flags = [
        "--scene", args.scene, "--pairs", str(args.pairs),
        "--seed", str(args.seed), "--samples", str(args.samples),
    ]
    rows = [
        ("scene", report.scene),
        ("pairs", vio.fmt(report.pairs)),
        ("max-ratio", vio.fmt(report.max_ratio)),
        ("bound", vio.fmt(report.bound)),
    ]
    return _write_check_report(args.out, "verify-lemma3", flags, rows, report.passed)


def _cmd_render(args) -> int:
    scene = make_scene(args.scene)
    doc = vio.parse_transforms(args.transforms)
    if not 0 <= args.pose_index < len(doc.views):
        raise ValueError(f"pose index {args.pose_index} outside 0..{len(doc.views) - 1}")
    try:
        w_str, h_str = args.size.lower().split("x")
        width, height = int(w_str), int(h_str)
    except ValueError:
        raise ValueError("--size must be WIDTHxHEIGHT, e.g. 64x64") from None
    cfg = RenderConfig(n_samples=args.samples, stratified=args.stratified, seed=args.seed)
    view = doc.views[args.pose_index]
    image = render_image(scene, view.pose, doc.camera_angle_x, width, height, cfg)
    vio.write_ppm(image, args.out)
    return 0


def _cmd_losses(args) -> int:
    image_paths = args.images.split(",")
    images = {}
    for p in image_paths:
        img = vio.read_ppm(p)
        images[Path(p).stem] = img
    features = vio.parse_embeddings(args.embeddings) if args.embeddings else {}

    pair_specs = []
    for spec in args.pairs.split(","):
        a, sep, b = spec.partition(":")
        if not sep or not a or not b:
            raise ValueError(f"pair {spec!r} must be idA:idB")
        pair_specs.append((a, b))
    for a, b in pair_specs:
        for vid in (a, b):
            if vid not in images:
                raise ValueError(f"pair id {vid!r} has no image")

    rows = []
    for a, b in pair_specs:
        if a in features and b in features:
            rows.append(("l_macro", a, b, l_macro(features[a], features[b])))
        rows.append(("l_micro_pairwise", a, b, l_micro_pairwise(images[a], images[b])))
        rows.append(("l_nerf", a, b, nerf_photometric_loss(images[a], images[b])))
    ordered = [images[k] for k in sorted(images)]
    rows.append(("l_micro_variance", "", "", l_micro_variance(ordered)))
    rows.append(("l_micro_variance_per_channel", "", "", l_micro_variance(ordered, per_channel=True)))

    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["metric", "id_a", "id_b", "value"])
        for name, a, b, value in rows:
            writer.writerow([name, a, b, vio.fmt(float(value))])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="viewplan",
        description="Information-driven view selection, rendering, and certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_select_flags(p, with_count=True):
        p.add_argument("--transforms", required=True, help="camera transforms file")
        p.add_argument("--embeddings", help="embeddings table (id,f0,...)")
        p.add_argument("--initial", required=True, help="comma-separated initial view ids")
        p.add_argument("--strategy", required=True, choices=CLI_STRATEGIES)
        p.add_argument("--lambda", type=float, default=1.0, help="weighted-metric coefficient")
        p.add_argument("--shortlist", type=int, default=20, help="sequential shortlist size")
        if with_count:
            p.add_argument("--count", type=int, required=True, help="views to select")
        p.add_argument("--metric", choices=("euclidean", "squared"), default="euclidean")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True, help="report path")

    p = sub.add_parser("select", help="select views with one strategy")
    add_select_flags(p)
    p.set_defaults(run=_cmd_select)

    p = sub.add_parser("active-loop", help="run the multi-round acquisition loop")
    p.add_argument("--schedule", required=True, help="INIT,PER,ROUNDS")
    p.add_argument(
        "--round-embeddings",
        help="per-round embeddings path template with a {round} placeholder",
    )
    add_select_flags(p, with_count=False)
    p.set_defaults(run=_cmd_active_loop)

    p = sub.add_parser("oracle", help="exhaustive optimum plus greedy ratio")
    p.add_argument("--transforms", required=True)
    p.add_argument("--embeddings")
    p.add_argument("--initial", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--metric", choices=("euclidean", "squared"), default="euclidean")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(run=_cmd_oracle)

    p = sub.add_parser("verify-lemma1", help="affine law of the ray-ensemble distance")
    p.add_argument("--t1", type=float, default=2.0)
    p.add_argument("--t2", type=float, default=3.0)
    p.add_argument("--theta-band", default=f"0,{math.pi / 3}", help="LO,HI elevation band")
    p.add_argument("--pairs", type=int, default=8)
    p.add_argument("--ray-samples", type=int, default=200_000)
    p.add_argument("--quad", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=0.02, help="relative slope tolerance")
    p.add_argument("--out", required=True)
    p.set_defaults(run=_cmd_verify_lemma1)

    p = sub.add_parser("verify-lemma2", help="greedy half-optimality battery")
    p.add_argument("--instances", type=int, default=500)
    p.add_argument("--pool", type=int, default=12)
    p.add_argument("--count", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(run=_cmd_verify_lemma2)

    p = sub.add_parser("verify-lemma3", help="rendered-color Lipschitz bound")
    p.add_argument("--scene", default="gradient", choices=sorted(SCENES))
    p.add_argument("--pairs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--out", required=True)
    p.set_defaults(run=_cmd_verify_lemma3)

    p = sub.add_parser("render", help="render a scene from a camera-file pose")
    p.add_argument("--scene", required=True, choices=sorted(SCENES))
    p.add_argument("--pose-index", type=int, required=True)
    p.add_argument("--transforms", required=True)
    p.add_argument("--size", required=True, help="WIDTHxHEIGHT")
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--stratified", action="store_true", help="jitter sample nodes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output PPM path")
    p.set_defaults(run=_cmd_render)

    p = sub.add_parser("losses", help="loss table for image/embedding pairs")
    p.add_argument("--images", required=True, help="comma-separated PPM paths")
    p.add_argument("--embeddings", help="embeddings table for the macro term")
    p.add_argument("--pairs", required=True, help="comma-separated idA:idB pairs")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(run=_cmd_losses)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
