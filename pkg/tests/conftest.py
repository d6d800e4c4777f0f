import dataclasses
import math
from pathlib import Path

import numpy as np
import pytest

from viewplan.distances import FeatureVector, RayModel
from viewplan.geometry import CameraPose, Vec3, ViewRecord
from viewplan.io import parse_embeddings, parse_transforms

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_paths():
    return {
        "transforms": FIXTURES / "transforms_100.json",
        "embeddings": FIXTURES / "embeddings_100.csv",
        "rounds": [FIXTURES / f"embeddings_100_round{r}.csv" for r in range(1, 5)],
    }


@pytest.fixture(scope="session")
def fixture_views(fixture_paths):
    """All 100 fixture views with their base features attached."""
    doc = parse_transforms(fixture_paths["transforms"])
    feats = parse_embeddings(fixture_paths["embeddings"])
    return [dataclasses.replace(v, feature=feats[v.id]) for v in doc.views]


@pytest.fixture(scope="session")
def round_features(fixture_paths):
    return [parse_embeddings(p) for p in fixture_paths["rounds"]]


@pytest.fixture
def unit_model():
    return RayModel(theta_low=0.0, theta_high=math.pi / 3, t1_len=1.0, t2_len=1.0)


def view_at(vid, x, y=0.0, z=0.0, feature=None):
    feat = FeatureVector(tuple(feature)) if feature is not None else None
    return ViewRecord(id=vid, pose=CameraPose(position=Vec3(x, y, z)), feature=feat)


def line_instance():
    """Initial view at 0, candidates at x = 1..10 on the x-axis."""
    initial = [view_at("v00", 0.0)]
    candidates = [view_at(f"v{i:02d}", float(i)) for i in range(1, 11)]
    return initial, candidates


def random_views(rng, n, prefix="c", with_features=False, dim=6):
    pts = rng.uniform(0.0, 1.0, (n, 3))
    feats = rng.normal(size=(n, dim)) if with_features else [None] * n
    out = []
    for i in range(n):
        feature = FeatureVector(tuple(feats[i])) if with_features else None
        out.append(
            ViewRecord(
                id=f"{prefix}{i:03d}",
                pose=CameraPose(position=Vec3.from_array(pts[i])),
                feature=feature,
            )
        )
    return out
