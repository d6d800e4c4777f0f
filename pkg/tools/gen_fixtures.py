#!/usr/bin/env python3
"""Regenerate the checked-in test fixtures (100-view camera set + embeddings).

Deterministic: running this script always reproduces the same files.  The
feature vectors mix view-direction structure with seeded noise so that the
semantic and pixel orderings are related but not identical, which keeps the
different selection strategies distinguishable on this pool.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from viewplan.distances import FeatureVector
from viewplan.geometry import CameraPose, Vec3, ViewRecord
from viewplan.io import TransformsDocument, write_embeddings, write_transforms

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
N_VIEWS = 100
RADIUS = 4.0
CAMERA_ANGLE_X = 0.6911112070083618
SEED = 20250810
ROUNDS = 4


def look_at_origin(position: np.ndarray) -> np.ndarray:
    """World-from-camera rotation: camera -z axis points at the origin."""
    backward = position / np.linalg.norm(position)
    up = np.array([0.0, 0.0, 1.0])
    right = np.cross(up, backward)
    right /= np.linalg.norm(right)
    true_up = np.cross(backward, right)
    return np.stack([right, true_up, backward], axis=1)


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)

    views = []
    dirs = np.empty((N_VIEWS, 3))
    for i in range(N_VIEWS):
        azimuth = rng.uniform(0.0, 2.0 * math.pi)
        elevation = rng.uniform(math.radians(10.0), math.radians(60.0))
        d = np.array(
            [
                math.cos(elevation) * math.cos(azimuth),
                math.cos(elevation) * math.sin(azimuth),
                math.sin(elevation),
            ]
        )
        dirs[i] = d
        position = RADIUS * d
        views.append(
            ViewRecord(
                id=f"r_{i:03d}",
                pose=CameraPose(position=Vec3.from_array(position), rotation=look_at_origin(position)),
            )
        )
    write_transforms(
        TransformsDocument(views=tuple(views), camera_angle_x=CAMERA_ANGLE_X),
        FIXTURES / "transforms_100.json",
    )

    # close-in ring for render demos: sample range [0, 1] only sees content
    # within about a unit of the camera
    ring = []
    for i in range(8):
        azimuth = 2.0 * math.pi * i / 8
        elevation = math.radians(20.0)
        d = np.array(
            [
                math.cos(elevation) * math.cos(azimuth),
                math.cos(elevation) * math.sin(azimuth),
                math.sin(elevation),
            ]
        )
        position = 0.75 * d
        ring.append(
            ViewRecord(
                id=f"ring_{i}",
                pose=CameraPose(position=Vec3.from_array(position), rotation=look_at_origin(position)),
            )
        )
    write_transforms(
        TransformsDocument(views=tuple(ring), camera_angle_x=CAMERA_ANGLE_X),
        FIXTURES / "transforms_ring8.json",
    )

    base = np.concatenate([dirs, np.sin(3.0 * dirs), rng.normal(0.0, 0.35, (N_VIEWS, 10))], axis=1)
    base /= np.linalg.norm(base, axis=1, keepdims=True)
    ids = [v.id for v in views]
    write_embeddings(
        {vid: FeatureVector.from_array(base[i]) for i, vid in enumerate(ids)},
        FIXTURES / "embeddings_100.csv",
    )
    for r in range(1, ROUNDS + 1):
        jittered = base + rng.normal(0.0, 0.15, base.shape)
        jittered /= np.linalg.norm(jittered, axis=1, keepdims=True)
        write_embeddings(
            {vid: FeatureVector.from_array(jittered[i]) for i, vid in enumerate(ids)},
            FIXTURES / f"embeddings_100_round{r}.csv",
        )
    print(f"wrote fixtures to {FIXTURES}")


if __name__ == "__main__":
    main()
