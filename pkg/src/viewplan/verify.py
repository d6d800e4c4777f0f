"""Numerical certificates for the three guarantees behind the planner.

Each battery builds its own probe instances, runs the implementation under
test against an independent route (Monte-Carlo sampling, exhaustive search,
or analytic constants), and reports a pass/fail verdict with the observed
margins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .distances import (
    DistanceMetric,
    FeatureVector,
    RayModel,
    fit_affine_relation,
    pixel_distance_monte_carlo,
)
from .geometry import CameraPose, Vec3, ViewRecord
from .renderer import RenderConfig, lipschitz_bound_check
from .scenes import SyntheticScene
from .selection import approximation_ratio, brute_force_optimal, greedy_select


@dataclass(frozen=True)
class AffineLawReport:
    """Fit of Monte-Carlo estimates against the closed-form slope."""

    slope: float
    intercept: float
    r_squared: float
    expected_slope: float
    relative_error: float
    tolerance: float
    samples: tuple
    passed: bool


def affine_law_battery(
    model: RayModel,
    n_pairs: int = 8,
    n_ray_pairs: int = 200_000,
    n_quad: int = 64,
    seed: int = 0,
    d2_low: float = 0.01,
    d2_high: float = 4.0,
    tolerance: float = 0.02,
) -> AffineLawReport:
    """Verify that the ray-ensemble distance is affine in squared separation.

    Pose pairs span ``[d2_low, d2_high]`` in squared separation and are
    displaced within the x-y plane: with an elevation band that is not
    symmetric about zero and unequal travel lengths, an out-of-plane offset
    would add a term linear in the height difference, which the affine model
    deliberately excludes.  Passes when the fitted slope is within
    ``tolerance`` (relative) of t1_len * t2_len and r^2 >= 0.999.
    """
    if n_pairs < 6:
        raise ValueError("need at least 6 pose pairs for a meaningful fit")
    rng = np.random.default_rng(seed)
    d2 = np.linspace(d2_low, d2_high, n_pairs)
    samples = []
    for i in range(n_pairs):
        base = rng.uniform(-1.0, 1.0, 3)
        psi = rng.uniform(0.0, 2.0 * math.pi)
        offset = math.sqrt(d2[i]) * np.array([math.cos(psi), math.sin(psi), 0.0])
        a = CameraPose(position=Vec3.from_array(base))
        b = CameraPose(position=Vec3.from_array(base + offset))
        pair_seed = int(rng.integers(0, 2**63))
        est = pixel_distance_monte_carlo(a, b, model, n_ray_pairs, n_quad, pair_seed)
        samples.append((float(d2[i]), est))

    slope, intercept, r_squared = fit_affine_relation(samples)
    expected = model.t1_len * model.t2_len
    rel_err = abs(slope - expected) / expected
    passed = rel_err <= tolerance and r_squared >= 0.999
    return AffineLawReport(
        slope=slope,
        intercept=intercept,
        r_squared=r_squared,
        expected_slope=expected,
        relative_error=rel_err,
        tolerance=tolerance,
        samples=tuple(samples),
        passed=passed,
    )


@dataclass(frozen=True)
class GreedyRatioReport:
    """Greedy-vs-oracle separation ratios over random instances."""

    instances: int
    min_ratio: float
    mean_ratio: float
    violations: int
    passed: bool


def greedy_ratio_battery(
    n_instances: int = 500,
    pool: int = 12,
    count: int = 4,
    n_initial: int = 1,
    seed: int = 0,
) -> GreedyRatioReport:
    """Certify the half-optimal guarantee on random unit-cube instances.

    Positions are uniform in the unit cube, the metric is Euclidean (the
    guarantee needs the triangle inequality), and every instance is solved
    both greedily and exhaustively.
    """
    rng = np.random.default_rng(seed)
    model = RayModel(theta_low=0.0, theta_high=math.pi / 3, t1_len=1.0, t2_len=1.0)
    metric = DistanceMetric.euclidean()
    ratios = np.empty(n_instances)
    for k in range(n_instances):
        pts = rng.uniform(0.0, 1.0, (pool + n_initial, 3))
        initial = [
            ViewRecord(id=f"init{j:02d}", pose=CameraPose(position=Vec3.from_array(pts[j])))
            for j in range(n_initial)
        ]
        candidates = [
            ViewRecord(id=f"c{j:03d}", pose=CameraPose(position=Vec3.from_array(pts[n_initial + j])))
            for j in range(pool)
        ]
        greedy = greedy_select(initial, candidates, metric, model, count)
        oracle = brute_force_optimal(initial, candidates, metric, model, count)
        ratios[k] = approximation_ratio(greedy, oracle)

    violations = int((ratios < 0.5).sum())
    return GreedyRatioReport(
        instances=n_instances,
        min_ratio=float(ratios.min()),
        mean_ratio=float(ratios.mean()),
        violations=violations,
        passed=violations == 0,
    )


@dataclass(frozen=True)
class MonotonicityReport:
    """Per-iteration separation monotonicity over random greedy runs."""

    runs: int
    violations: int
    passed: bool


def greedy_monotonicity_battery(n_runs: int = 1000, seed: int = 0) -> MonotonicityReport:
    """Check that greedy separations never increase across iterations."""
    rng = np.random.default_rng(seed)
    model = RayModel(theta_low=0.0, theta_high=math.pi / 3, t1_len=1.0, t2_len=1.0)
    metrics = [DistanceMetric.euclidean(), DistanceMetric.squared(), DistanceMetric.semantic()]
    violations = 0
    for k in range(n_runs):
        pool = int(rng.integers(5, 16))
        count = int(rng.integers(2, min(pool, 8) + 1))
        metric = metrics[k % len(metrics)]
        pts = rng.uniform(0.0, 1.0, (pool + 1, 3))
        feats = rng.normal(size=(pool + 1, 6))
        initial = [
            ViewRecord(
                id="init",
                pose=CameraPose(position=Vec3.from_array(pts[0])),
                feature=FeatureVector.from_array(feats[0]),
            )
        ]
        candidates = [
            ViewRecord(
                id=f"c{j:03d}",
                pose=CameraPose(position=Vec3.from_array(pts[1 + j])),
                feature=FeatureVector.from_array(feats[1 + j]),
            )
            for j in range(pool)
        ]
        result = greedy_select(initial, candidates, metric, model, count)
        seps = result.separations
        if any(seps[i + 1] > seps[i] for i in range(len(seps) - 1)):
            violations += 1
    return MonotonicityReport(runs=n_runs, violations=violations, passed=violations == 0)


@dataclass(frozen=True)
class ColorBoundReport:
    """Color-difference slopes against the 3L certificate."""

    scene: str
    pairs: int
    max_ratio: float
    bound: float
    passed: bool


def color_bound_battery(
    scene: SyntheticScene,
    n_pairs: int = 100,
    seed: int = 0,
    n_samples: int = 64,
    sep_low: float = 1e-3,
    sep_high: float = 0.3,
    directions: int = 10,
) -> ColorBoundReport:
    """Probe the rendered-color Lipschitz bound over same-direction pose pairs.

    Pairs are grouped under a handful of shared ray directions; within each
    group the positional separations span [sep_low, sep_high].
    """
    if n_pairs < 1:
        raise ValueError("need at least one pair")
    rng = np.random.default_rng(seed)
    cfg = RenderConfig(n_samples=n_samples)
    lo, hi = scene.bounds
    groups = np.array_split(np.arange(n_pairs), min(directions, n_pairs))
    max_ratio = 0.0
    for group in groups:
        if len(group) == 0:
            continue
        d = rng.normal(size=3)
        d /= np.linalg.norm(d)
        pairs = []
        for _ in group:
            base = rng.uniform(lo, hi, 3)
            sep = rng.uniform(sep_low, sep_high)
            off = rng.normal(size=3)
            off *= sep / np.linalg.norm(off)
            pairs.append(
                (
                    CameraPose(position=Vec3.from_array(base)),
                    CameraPose(position=Vec3.from_array(base + off)),
                )
            )
        report = lipschitz_bound_check(scene, pairs, Vec3.from_array(d), cfg)
        max_ratio = max(max_ratio, report.max_ratio)
    bound = 3.0 * scene.lipschitz_const
    return ColorBoundReport(
        scene=scene.name,
        pairs=n_pairs,
        max_ratio=max_ratio,
        bound=bound,
        passed=max_ratio <= bound,
    )


@dataclass(frozen=True)
class ArgmaxInvarianceReport:
    """Set equality of greedy selections under order-preserving transforms."""

    instances: int
    mismatches: int
    passed: bool


def argmax_invariance_battery(
    n_instances: int = 100,
    pool: int = 12,
    count: int = 4,
    seed: int = 0,
) -> ArgmaxInvarianceReport:
    """Greedy rosters must agree between Euclidean and squared metrics."""
    rng = np.random.default_rng(seed)
    model = RayModel(theta_low=0.0, theta_high=math.pi / 3, t1_len=2.0, t2_len=3.0)
    mismatches = 0
    for _ in range(n_instances):
        pts = rng.uniform(0.0, 1.0, (pool + 1, 3))
        initial = [ViewRecord(id="init", pose=CameraPose(position=Vec3.from_array(pts[0])))]
        candidates = [
            ViewRecord(id=f"c{j:03d}", pose=CameraPose(position=Vec3.from_array(pts[1 + j])))
            for j in range(pool)
        ]
        a = greedy_select(initial, candidates, DistanceMetric.euclidean(), model, count)
        b = greedy_select(initial, candidates, DistanceMetric.squared(), model, count)
        if set(a.order) != set(b.order):
            mismatches += 1
    return ArgmaxInvarianceReport(
        instances=n_instances, mismatches=mismatches, passed=mismatches == 0
    )
