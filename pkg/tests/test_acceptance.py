"""Acceptance criteria, one test per criterion.

Each test prints a single ``[criterion N] PASS/FAIL`` line (visible with
``pytest -s``) and enforces the criterion's stated tolerance and runtime
budget.  Criteria 1-9 run with the checked-in fixtures only; criterion 10
exercises the embedding frontend and skips when it has not been built.
"""

import dataclasses
import math
import shutil
import subprocess
import time
from pathlib import Path

import numpy as np
import pytest

from viewplan.cli import main
from viewplan.distances import FeatureVector, RayModel, semantic_distance
from viewplan.geometry import CameraPose, Vec3
from viewplan.io import parse_embeddings, write_ppm
from viewplan.renderer import (
    ColorImage,
    RenderConfig,
    l_macro,
    l_micro_pairwise,
    l_micro_variance,
    nerf_photometric_loss,
    render_ray,
)
from viewplan.scenes import gradient_scene, uniform_scene
from viewplan.selection import RoundSchedule, run_active_loop
from viewplan.verify import (
    affine_law_battery,
    argmax_invariance_battery,
    color_bound_battery,
    greedy_monotonicity_battery,
    greedy_ratio_battery,
)

REPO = Path(__file__).resolve().parent.parent
FRONTEND_CLI = REPO / "frontend" / "dist" / "cli.js"


def report(criterion, ok, detail):
    line = f"[criterion {criterion}] {'PASS' if ok else 'FAIL'}: {detail}"
    print(line)
    assert ok, line


def test_criterion_1_greedy_ratio_battery():
    start = time.perf_counter()
    rep = greedy_ratio_battery(n_instances=500, pool=12, count=4, n_initial=1, seed=20250810)
    elapsed = time.perf_counter() - start
    ok = rep.passed and rep.min_ratio >= 0.5 and elapsed < 10.0
    report(
        1,
        ok,
        f"500 instances, min ratio {rep.min_ratio:.4f}, mean ratio {rep.mean_ratio:.4f}, "
        f"violations {rep.violations}, {elapsed:.2f}s",
    )


def test_criterion_2_greedy_monotonicity():
    start = time.perf_counter()
    rep = greedy_monotonicity_battery(n_runs=1000, seed=20250811)
    elapsed = time.perf_counter() - start
    ok = rep.passed and elapsed < 5.0
    report(2, ok, f"1000 runs, violations {rep.violations}, {elapsed:.2f}s")


def test_criterion_3_affine_law_certificate():
    model = RayModel(theta_low=0.0, theta_high=math.pi / 3, t1_len=2.0, t2_len=3.0)
    start = time.perf_counter()
    rep = affine_law_battery(
        model,
        n_pairs=8,
        n_ray_pairs=200_000,
        n_quad=64,
        seed=20250812,
        d2_low=0.01,
        d2_high=4.0,
        tolerance=0.02,
    )
    elapsed = time.perf_counter() - start
    ok = rep.passed and elapsed < 60.0
    report(
        3,
        ok,
        f"slope {rep.slope:.5f} (expected {rep.expected_slope}, rel err "
        f"{rep.relative_error:.4%}), r^2 {rep.r_squared:.6f}, {elapsed:.2f}s",
    )


def test_criterion_4_color_bound_certificate():
    scene = gradient_scene(1.0)
    start = time.perf_counter()
    rep = color_bound_battery(
        scene, n_pairs=100, seed=20250813, n_samples=64, sep_low=1e-3, sep_high=0.3
    )
    elapsed = time.perf_counter() - start
    ok = rep.passed and elapsed < 30.0
    report(
        4,
        ok,
        f"{rep.pairs} pairs, max ratio {rep.max_ratio:.4f} <= bound {rep.bound}, {elapsed:.2f}s",
    )


def test_criterion_5_renderer_convergence():
    worst = 0.0
    for s in (0.5, 1.0, 2.0):
        scene = uniform_scene(s)
        ray_dir = Vec3(0.0, 0.0, 1.0)
        from viewplan.geometry import Ray

        rgb = render_ray(scene, Ray(origin=Vec3(0, 0, 0), direction=ray_dir), RenderConfig(n_samples=256))
        worst = max(worst, float(np.abs(rgb - (1.0 - math.exp(-s))).max()))
    ok = worst <= 1e-3
    report(5, ok, f"homogeneous medium, worst |error| {worst:.2e} <= 1e-3")


def test_criterion_6_argmax_invariance():
    rep = argmax_invariance_battery(n_instances=100, pool=12, count=4, seed=20250814)
    report(6, rep.passed, f"100 instances, roster mismatches {rep.mismatches}")


def _loop_inputs(fixture_views, count):
    initial = [dataclasses.replace(v, status="training") for v in fixture_views[:count]]
    candidates = list(fixture_views[count:])
    return initial, candidates


def test_criterion_7_active_loop_shapes(fixture_views, round_features):
    model = RayModel(theta_low=0.0, theta_high=math.pi / 3, t1_len=1.0, t2_len=1.0)
    strategies = [
        ("random", 1.0),
        ("fvs", 1.0),
        ("greedy-semantic", 1.0),
        ("s-then-p", 1.0),
        ("p-then-s", 1.0),
        ("weighted", 0.1),
        ("weighted", 1.0),
        ("weighted", 10.0),
    ]
    initial, candidates = _loop_inputs(fixture_views, 4)
    candidate_ids = {c.id for c in candidates}
    rosters = {}
    for strategy, lam in strategies:
        loop = run_active_loop(
            RoundSchedule(4, 4, 4),
            strategy,
            initial,
            candidates,
            model,
            features_per_round=round_features,
            lam=lam,
            seed=17,
        )
        label = f"{strategy}(lam={lam})" if strategy == "weighted" else strategy
        roster = loop.roster
        valid = (
            len(roster) == 20
            and len(set(roster)) == 20
            and roster[:4] == tuple(v.id for v in initial)
            and set(roster[4:]) <= candidate_ids
        )
        assert valid, f"invalid roster for {label}"
        rosters[label] = frozenset(roster)

    labels = list(rosters)
    collisions = [
        (a, b) for i, a in enumerate(labels) for b in labels[i + 1 :] if rosters[a] == rosters[b]
    ]

    initial2, candidates2 = _loop_inputs(fixture_views, 2)
    loop2 = run_active_loop(
        RoundSchedule(2, 2, 4), "fvs", initial2, candidates2, model, seed=17
    )
    ok = not collisions and len(loop2.roster) == 10 and len(set(loop2.roster)) == 10
    report(
        7,
        ok,
        f"setting I rosters of 20 for {len(labels)} strategies (pairwise distinct: "
        f"{not collisions}), setting II roster of {len(loop2.roster)}",
    )


def test_criterion_8_loss_identities():
    v = FeatureVector((0.3, -0.7, 1.1))
    img = ColorImage.from_array(np.random.default_rng(0).uniform(0, 1, (3, 4, 3)))
    zero = ColorImage.from_array(np.zeros((1, 1, 3)))
    red = ColorImage.from_array(np.array([[[1.0, 0.0, 0.0]]]))
    yellow = ColorImage.from_array(np.array([[[1.0, 1.0, 0.0]]]))
    checks = [
        l_macro(v, v) == 0.0,
        semantic_distance(FeatureVector((1, 0)), FeatureVector((0, 1))) == 1.0,
        semantic_distance(FeatureVector((1, 0)), FeatureVector((-1, 0))) == 2.0,
        l_micro_pairwise(img, img) == 0.0,
        l_micro_variance([img]) == 0.0,
        nerf_photometric_loss(img, img) == 0.0,
        nerf_photometric_loss(zero, red) == 1.0,
        nerf_photometric_loss(zero, yellow) == 2.0,
        l_micro_pairwise(zero, red) == 1.0,
    ]
    report(8, all(checks), f"{sum(checks)}/{len(checks)} exact identities hold")


def test_criterion_9_subcommand_determinism(fixture_paths, tmp_path):
    transforms = str(fixture_paths["transforms"])
    embeddings = str(fixture_paths["embeddings"])
    template = str(fixture_paths["rounds"][0]).replace("round1", "round{round}")

    img_dir = tmp_path / "imgs"
    img_dir.mkdir()
    rng = np.random.default_rng(1)
    for name in ("r_000", "r_001"):
        write_ppm(ColorImage.from_array(rng.uniform(0, 1, (6, 6, 3))), img_dir / f"{name}.ppm")

    invocations = {
        "select": ["select", "--transforms", transforms, "--embeddings", embeddings,
                   "--initial", "r_000,r_001,r_002,r_003", "--strategy", "weighted",
                   "--lambda", "0.1", "--count", "4", "--seed", "5"],
        "active-loop": ["active-loop", "--schedule", "2,2,2", "--transforms", transforms,
                        "--round-embeddings", template, "--initial", "r_000,r_001",
                        "--strategy", "s-then-p", "--seed", "5"],
        "oracle": ["oracle", "--transforms", transforms, "--initial", "r_000,r_001,r_002,r_003",
                   "--count", "2", "--seed", "5"],
        "verify-lemma1": ["verify-lemma1", "--pairs", "6", "--ray-samples", "5000",
                          "--quad", "16", "--seed", "5"],
        "verify-lemma2": ["verify-lemma2", "--instances", "20", "--pool", "9",
                          "--count", "3", "--seed", "5"],
        "verify-lemma3": ["verify-lemma3", "--scene", "gradient", "--pairs", "10", "--seed", "5"],
        "render": ["render", "--scene", "gradient", "--pose-index", "3", "--transforms",
                   transforms, "--size", "12x9", "--samples", "24", "--stratified",
                   "--seed", "5"],
        "losses": ["losses", "--images", f"{img_dir}/r_000.ppm,{img_dir}/r_001.ppm",
                   "--embeddings", embeddings, "--pairs", "r_000:r_001"],
    }
    mismatched = []
    for name, argv in invocations.items():
        out1 = tmp_path / f"{name}-1.out"
        out2 = tmp_path / f"{name}-2.out"
        code1 = main(argv + ["--out", str(out1)])
        code2 = main(argv + ["--out", str(out2)])
        if code1 != code2 or code1 not in (0, 1) or out1.read_bytes() != out2.read_bytes():
            mismatched.append(name)
    ok = not mismatched
    report(9, ok, f"{len(invocations)} subcommands byte-identical across reruns"
                  + ("" if ok else f"; mismatches: {mismatched}"))


@pytest.mark.skipif(
    not FRONTEND_CLI.exists() or shutil.which("node") is None,
    reason="secondary embedding frontend not built",
)
def test_criterion_10_embed_tool_roundtrip(tmp_path):
    fixture_dir = REPO / "frontend" / "fixtures" / "images"
    out = tmp_path / "embeddings.csv"
    proc = subprocess.run(
        ["node", str(FRONTEND_CLI), "--input", str(fixture_dir), "--output", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    feats = parse_embeddings(out)
    dims = {f.dim for f in feats.values()}
    norms = [float(np.linalg.norm(f.as_array())) for f in feats.values()]
    dup_dist = semantic_distance(feats["dup_a"], feats["dup_b"])
    ok = (
        len(feats) >= 5
        and len(dims) == 1
        and all(abs(n - 1.0) <= 1e-4 for n in norms)
        and dup_dist <= 1e-5
    )
    report(
        10,
        ok,
        f"{len(feats)} rows, dim {dims.pop()}, max norm error "
        f"{max(abs(n - 1.0) for n in norms):.2e}, duplicate cosine distance {dup_dist:.2e}",
    )
