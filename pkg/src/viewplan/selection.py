"""Sparse view selection: greedy max-min, baselines, oracle, active loop.

The greedy algorithm picks, at every iteration, the candidate farthest (in
the chosen metric) from everything already known -- initial views plus
earlier picks.  Under a metric satisfying the triangle inequality the final
min-separation is at least half the exhaustive optimum; the brute-force
oracle here exists to certify that ratio numerically.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence

import numpy as np

from .distances import (
    DistanceMetric,
    FeatureVector,
    RayModel,
    pairwise_matrix,
    weighted_pixel_scale,
)
from .geometry import ViewRecord, check_unique_ids

ORACLE_SUBSET_GUARD = 10**6

STRATEGY_NAMES = (
    "random",
    "fvs",
    "greedy-pixel",
    "greedy-semantic",
    "s-then-p",
    "p-then-s",
    "weighted",
)


@dataclass(frozen=True)
class SelectionResult:
    """Ordered picks with per-iteration separations.

    ``separations[i]`` is the max-min score achieved when the i-th view was
    chosen; ``delta_tilde`` is their minimum, the quantity the greedy
    guarantee speaks about.  ``metric`` labels the measure the separations
    were computed in -- cross-strategy comparisons are only meaningful under
    a shared metric.
    """

    order: tuple
    separations: tuple
    delta_tilde: float
    strategy: str
    metric: str
    seed: Optional[int] = None
    fingerprint: Optional[str] = None

    def __post_init__(self) -> None:
        if len(self.order) != len(self.separations):
            raise ValueError("order and separations must have equal length")
        if self.separations and self.delta_tilde != min(self.separations):
            raise ValueError("delta_tilde must equal min(separations)")


@dataclass(frozen=True)
class OracleResult:
    """Exhaustive-search optimum for the max-min separation program."""

    subset: tuple
    delta_star: float
    evaluated_subsets: int
    fingerprint: Optional[str] = None


@dataclass(frozen=True)
class RoundSchedule:
    """Active-loop shape: initial views, picks per round, number of rounds."""

    initial_count: int
    per_round: int
    rounds: int

    def __post_init__(self) -> None:
        if self.initial_count < 1:
            raise ValueError("initial_count must be at least 1")
        if self.per_round < 1:
            raise ValueError("per_round must be at least 1")
        if self.rounds < 0:
            raise ValueError("rounds must be nonnegative")

    @property
    def total(self) -> int:
        return self.initial_count + self.per_round * self.rounds


@dataclass(frozen=True)
class ActiveLoopResult:
    """Per-round selection results plus the cumulative roster."""

    rounds: tuple
    roster: tuple
    strategy: str
    schedule: RoundSchedule
    seed: Optional[int] = None


def instance_fingerprint(
    initial: Sequence[ViewRecord],
    candidates: Sequence[ViewRecord],
    metric: DistanceMetric,
    model: RayModel,
    count: int,
) -> str:
    """Stable hash of a selection instance, for cross-result sanity checks."""
    h = hashlib.sha256()

    def _feed(views: Sequence[ViewRecord]) -> None:
        for v in sorted(views, key=lambda r: r.id):
            p = v.pose.position
            h.update(v.id.encode())
            h.update(np.array([p.x, p.y, p.z]).tobytes())
            if v.feature is not None:
                h.update(v.feature.as_array().tobytes())

    _feed(initial)
    h.update(b"|")
    _feed(candidates)
    h.update(metric.label().encode())
    h.update(
        np.array([model.theta_low, model.theta_high, model.t1_len, model.t2_len, float(count)]).tobytes()
    )
    return h.hexdigest()


class _Pool:
    """Validated candidate pool with cached pairwise distance blocks."""

    def __init__(
        self,
        initial: Sequence[ViewRecord],
        candidates: Sequence[ViewRecord],
        metric: DistanceMetric,
        model: RayModel,
    ) -> None:
        if len(initial) == 0:
            raise ValueError("initial reference set must be nonempty")
        if len(candidates) == 0:
            raise ValueError("candidate pool must be nonempty")
        check_unique_ids(list(initial) + list(candidates))
        if metric.kind == "weighted" and metric.pixel_scale is None:
            metric = replace(
                metric, pixel_scale=weighted_pixel_scale(list(initial) + list(candidates), model)
            )
        self.metric = metric
        self.model = model
        self.initial = list(initial)
        # id-sorted order makes first-index tie-breaks lexicographic
        self.candidates = sorted(candidates, key=lambda r: r.id)
        self.ids = [c.id for c in self.candidates]
        self.dist_to_initial = pairwise_matrix(metric, model, self.candidates, self.initial)
        self.dist_between = pairwise_matrix(metric, model, self.candidates, self.candidates)

    def greedy(self, count: int) -> tuple[list, list]:
        """Run max-min greedy; returns (picked ids, per-iteration separations)."""
        n = len(self.candidates)
        if count < 1:
            raise ValueError("count must be at least 1")
        if count > n:
            raise ValueError(f"count {count} exceeds candidate pool of {n}")
        min_dist = self.dist_to_initial.min(axis=1)
        available = np.ones(n, dtype=bool)
        order: list = []
        seps: list = []
        for _ in range(count):
            scores = np.where(available, min_dist, -np.inf)
            best = float(scores.max())
            # ties resolve to the lexicographically smallest id (sorted order)
            pick = int(np.argmax(scores == best))
            order.append(self.ids[pick])
            seps.append(best)
            available[pick] = False
            min_dist = np.minimum(min_dist, self.dist_between[:, pick])
        return order, seps


def _result(
    order: Sequence[str],
    seps: Sequence[float],
    strategy: str,
    metric_label: str,
    seed: Optional[int],
    fingerprint: Optional[str],
) -> SelectionResult:
    return SelectionResult(
        order=tuple(order),
        separations=tuple(float(s) for s in seps),
        delta_tilde=float(min(seps)) if seps else math.inf,
        strategy=strategy,
        metric=metric_label,
        seed=seed,
        fingerprint=fingerprint,
    )


def greedy_select(
    initial: Sequence[ViewRecord],
    candidates: Sequence[ViewRecord],
    metric: DistanceMetric,
    model: RayModel,
    count: int,
    *,
    strategy: str = "greedy",
    seed: Optional[int] = None,
) -> SelectionResult:
    """Select ``count`` views by look-ahead max-min greedy.

    Each iteration picks the candidate whose minimum distance to the initial
    views plus all earlier picks is largest; that max-min value is recorded
    as the iteration's separation.  Ties break to the smallest id.
    """
    pool = _Pool(initial, candidates, metric, model)
    order, seps = pool.greedy(count)
    fp = instance_fingerprint(initial, candidates, metric, model, count)
    return _result(order, seps, strategy, pool.metric.label(), seed, fp)


def brute_force_optimal(
    initial: Sequence[ViewRecord],
    candidates: Sequence[ViewRecord],
    metric: DistanceMetric,
    model: RayModel,
    count: int,
) -> OracleResult:
    """Exhaustively find the subset maximizing the min pairwise separation.

    A subset scores the minimum distance over all pairs that involve at
    least one subset member (subset-subset and subset-initial pairs);
    initial-initial distances are fixed constraints, not decision variables.
    Ties break to the lexicographically smallest id tuple.
    """
    pool = _Pool(initial, candidates, metric, model)
    n = len(pool.candidates)
    if count < 1:
        raise ValueError("count must be at least 1")
    if count > n:
        raise ValueError(f"count {count} exceeds candidate pool of {n}")
    n_subsets = math.comb(n, count)
    if n_subsets > ORACLE_SUBSET_GUARD:
        raise ValueError(f"{n_subsets} subsets exceeds enumeration guard {ORACLE_SUBSET_GUARD}")

    subsets = np.array(list(itertools.combinations(range(n), count)), dtype=int)
    init_min = pool.dist_to_initial[subsets].min(axis=(1, 2))
    if count >= 2:
        pair_idx = list(itertools.combinations(range(count), 2))
        within = np.stack(
            [pool.dist_between[subsets[:, i], subsets[:, j]] for i, j in pair_idx], axis=1
        )
        delta = np.minimum(init_min, within.min(axis=1))
    else:
        delta = init_min

    best = float(delta.max())
    # combinations() enumerates index tuples lexicographically over the
    # id-sorted pool, so the first maximum is the lexicographic winner
    pick = int(np.argmax(delta == best))
    subset_ids = tuple(pool.ids[i] for i in subsets[pick])
    fp = instance_fingerprint(initial, candidates, metric, model, count)
    return OracleResult(
        subset=subset_ids,
        delta_star=best,
        evaluated_subsets=int(n_subsets),
        fingerprint=fp,
    )


def approximation_ratio(greedy: SelectionResult, oracle: OracleResult) -> float:
    """Ratio of the greedy min-separation to the exhaustive optimum.

    Only meaningful when both results came from the same instance under a
    triangle-inequality metric; fingerprints guard the former.
    """
    if (
        greedy.fingerprint is not None
        and oracle.fingerprint is not None
        and greedy.fingerprint != oracle.fingerprint
    ):
        raise ValueError("greedy and oracle results come from different instances")
    if oracle.delta_star == 0.0:
        return 1.0
    return greedy.delta_tilde / oracle.delta_star


def sequential_select(
    initial: Sequence[ViewRecord],
    candidates: Sequence[ViewRecord],
    first: str,
    shortlist_k: int,
    model: RayModel,
    count: int,
    *,
    pixel_metric: Optional[DistanceMetric] = None,
    refresh_shortlist: bool = True,
    seed: Optional[int] = None,
) -> SelectionResult:
    """Two-stage selection: shortlist by one criterion, pick by the other.

    ``first="semantic"`` shortlists the ``shortlist_k`` candidates with the
    largest semantic set-distance and picks within them by pixel distance;
    ``first="pixel"`` swaps the roles.  Each pick joins the reference set
    before the next.  By default the shortlist is recomputed for every pick
    (consistent with the look-ahead greedy); ``refresh_shortlist=False``
    freezes it once per call.
    """
    if first not in ("semantic", "pixel"):
        raise ValueError("first must be 'semantic' or 'pixel'")
    if pixel_metric is None:
        pixel_metric = DistanceMetric.euclidean()
    if pixel_metric.kind not in ("euclidean", "squared"):
        raise ValueError("pixel_metric must be a pixel metric")
    if shortlist_k < count:
        raise ValueError(f"shortlist_k {shortlist_k} smaller than count {count}")
    semantic = DistanceMetric.semantic()
    stage1, stage2 = (semantic, pixel_metric) if first == "semantic" else (pixel_metric, semantic)

    pool1 = _Pool(initial, candidates, stage1, model)
    pool2 = _Pool(initial, candidates, stage2, model)
    n = len(pool1.candidates)
    if count > n:
        raise ValueError(f"count {count} exceeds candidate pool of {n}")

    min1 = pool1.dist_to_initial.min(axis=1)
    min2 = pool2.dist_to_initial.min(axis=1)
    available = np.ones(n, dtype=bool)
    frozen_shortlist: Optional[np.ndarray] = None
    order: list = []
    seps: list = []
    for step in range(count):
        if refresh_shortlist or frozen_shortlist is None:
            scores1 = np.where(available, min1, -np.inf)
            # stable sort keeps id order among exact ties; take top k
            ranked = np.argsort(-scores1, kind="stable")
            k = min(shortlist_k, int(available.sum()))
            shortlist = ranked[:k]
            if not refresh_shortlist:
                frozen_shortlist = shortlist
        else:
            shortlist = frozen_shortlist[np.isin(frozen_shortlist, np.where(available)[0])]
            if len(shortlist) < count - step:
                raise ValueError("frozen shortlist exhausted before all picks were made")
        scores2 = min2[shortlist]
        best = float(scores2.max())
        pick = int(shortlist[np.argmax(scores2 == best)])
        order.append(pool1.ids[pick])
        seps.append(best)
        available[pick] = False
        min1 = np.minimum(min1, pool1.dist_between[:, pick])
        min2 = np.minimum(min2, pool2.dist_between[:, pick])

    strategy = "s-then-p" if first == "semantic" else "p-then-s"
    metric_label = f"{stage1.label()}->{stage2.label()} shortlist={shortlist_k}"
    fp = instance_fingerprint(initial, candidates, stage2, model, count)
    return _result(order, seps, strategy, metric_label, seed, fp)


def baseline_select(
    kind: str,
    lam: float,
    initial: Sequence[ViewRecord],
    candidates: Sequence[ViewRecord],
    model: RayModel,
    count: int,
    seed: Optional[int] = None,
    *,
    rng: Optional[np.random.Generator] = None,
) -> SelectionResult:
    """Reference strategies: random, fvs, semantic-only, weighted greedy.

    Random draws uniformly without replacement under the seed and records
    separations under the Euclidean metric for reporting only; the other
    kinds are the greedy algorithm under the corresponding metric.
    """
    if kind == "random":
        if rng is None:
            if seed is None:
                raise ValueError("random baseline requires a seed")
            rng = np.random.default_rng(seed)
        pool = _Pool(initial, candidates, DistanceMetric.euclidean(), model)
        n = len(pool.candidates)
        if count > n:
            raise ValueError(f"count {count} exceeds candidate pool of {n}")
        picks = rng.choice(n, size=count, replace=False)
        min_dist = pool.dist_to_initial.min(axis=1)
        order, seps = [], []
        for pick in picks:
            order.append(pool.ids[int(pick)])
            seps.append(float(min_dist[int(pick)]))
            min_dist = np.minimum(min_dist, pool.dist_between[:, int(pick)])
        fp = instance_fingerprint(initial, candidates, DistanceMetric.euclidean(), model, count)
        return _result(order, seps, "random", "euclidean (reporting only)", seed, fp)
    if kind == "fvs":
        return greedy_select(
            initial, candidates, DistanceMetric.euclidean(), model, count, strategy="fvs", seed=seed
        )
    if kind == "semantic_only":
        return greedy_select(
            initial,
            candidates,
            DistanceMetric.semantic(),
            model,
            count,
            strategy="greedy-semantic",
            seed=seed,
        )
    if kind == "weighted":
        return greedy_select(
            initial,
            candidates,
            DistanceMetric.weighted(lam),
            model,
            count,
            strategy="weighted",
            seed=seed,
        )
    raise ValueError(f"unknown baseline kind {kind!r}")


def _with_features(
    views: Sequence[ViewRecord], features: Mapping[str, FeatureVector], label: str
) -> list:
    missing = [v.id for v in views if v.id not in features]
    if missing:
        raise ValueError(f"round features missing for {label} views: {missing}")
    return [replace(v, feature=features[v.id]) for v in views]


def _strategy_needs_features(strategy: str) -> bool:
    return strategy in ("greedy-semantic", "s-then-p", "p-then-s", "weighted")


def select_with_strategy(
    strategy: str,
    initial: Sequence[ViewRecord],
    candidates: Sequence[ViewRecord],
    model: RayModel,
    count: int,
    *,
    pixel_metric: Optional[DistanceMetric] = None,
    lam: float = 1.0,
    shortlist_k: int = 20,
    seed: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    refresh_shortlist: bool = True,
) -> SelectionResult:
    """Dispatch one acquisition step to the named strategy."""
    if strategy not in STRATEGY_NAMES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGY_NAMES}")
    if pixel_metric is None:
        pixel_metric = DistanceMetric.euclidean()
    if strategy == "random":
        return baseline_select("random", lam, initial, candidates, model, count, seed, rng=rng)
    if strategy in ("fvs", "greedy-pixel"):
        return greedy_select(
            initial, candidates, pixel_metric, model, count, strategy=strategy, seed=seed
        )
    if strategy == "greedy-semantic":
        return baseline_select("semantic_only", lam, initial, candidates, model, count, seed)
    if strategy == "weighted":
        return baseline_select("weighted", lam, initial, candidates, model, count, seed)
    first = "semantic" if strategy == "s-then-p" else "pixel"
    return sequential_select(
        initial,
        candidates,
        first,
        shortlist_k,
        model,
        count,
        pixel_metric=pixel_metric,
        refresh_shortlist=refresh_shortlist,
        seed=seed,
    )


def run_active_loop(
    schedule: RoundSchedule,
    strategy: str,
    initial: Sequence[ViewRecord],
    candidates: Sequence[ViewRecord],
    model: RayModel,
    *,
    features_per_round: Optional[Sequence[Mapping[str, FeatureVector]]] = None,
    pixel_metric: Optional[DistanceMetric] = None,
    lam: float = 1.0,
    shortlist_k: int = 20,
    seed: Optional[int] = None,
    refresh_shortlist: bool = True,
) -> ActiveLoopResult:
    """Run the acquisition loop: pick per_round views per round, rounds times.

    Acquired views join the reference set before the next round.  Candidate
    (and reference) features may be refreshed per round via
    ``features_per_round`` -- in the real pipeline they come from renders of
    the current model, so they change as training progresses.
    """
    if len(initial) != schedule.initial_count:
        raise ValueError(
            f"schedule expects {schedule.initial_count} initial views, got {len(initial)}"
        )
    if features_per_round is not None and len(features_per_round) != schedule.rounds:
        raise ValueError(
            f"features_per_round must have one entry per round ({schedule.rounds}), "
            f"got {len(features_per_round)}"
        )
    check_unique_ids(list(initial) + list(candidates))

    refs = list(initial)
    pool = list(candidates)
    rng = np.random.default_rng(seed) if strategy == "random" else None
    results = []
    for round_idx in range(schedule.rounds):
        if len(pool) < schedule.per_round:
            raise ValueError(
                f"candidate pool exhausted in round {round_idx + 1}: "
                f"{len(pool)} left, {schedule.per_round} needed"
            )
        round_refs, round_pool = refs, pool
        if features_per_round is not None:
            fmap = features_per_round[round_idx]
            if _strategy_needs_features(strategy):
                round_refs = _with_features(refs, fmap, "reference")
                round_pool = _with_features(pool, fmap, "candidate")
        result = select_with_strategy(
            strategy,
            round_refs,
            round_pool,
            model,
            schedule.per_round,
            pixel_metric=pixel_metric,
            lam=lam,
            shortlist_k=shortlist_k,
            seed=seed,
            rng=rng,
            refresh_shortlist=refresh_shortlist,
        )
        results.append(result)
        picked = set(result.order)
        acquired = [replace(v, status="acquired") for v in pool if v.id in picked]
        refs = refs + acquired
        pool = [v for v in pool if v.id not in picked]

    roster = tuple([v.id for v in initial] + [vid for r in results for vid in r.order])
    return ActiveLoopResult(
        rounds=tuple(results), roster=roster, strategy=strategy, schedule=schedule, seed=seed
    )
