#!/usr/bin/env python3
"""How the two view-distance families behave.

Semantic distance compares feature vectors (1 - cosine similarity); pixel
distance compares camera positions through the ray-ensemble geometry.  The
Monte-Carlo estimator lets us see the closed-form slope t1*t2 emerge from
raw sampling.
"""

import math

import numpy as np

from viewplan import (
    CameraPose,
    DistanceMetric,
    FeatureVector,
    RayModel,
    Vec3,
    ViewRecord,
    pixel_distance_closed_form,
    pixel_distance_monte_carlo,
    semantic_distance,
    set_distance,
)

print("== semantic distance ==")
a = FeatureVector((1.0, 0.0, 0.0))
b = FeatureVector((0.8, 0.6, 0.0))
c = FeatureVector((-1.0, 0.0, 0.0))
print(f"  aligned-ish : {semantic_distance(a, b):.4f}")
print(f"  identical   : {semantic_distance(a, a):.4f}")
print(f"  antipodal   : {semantic_distance(a, c):.4f}")

print()
print("== pixel distance: closed form vs Monte-Carlo ==")
model = RayModel(theta_low=0.0, theta_high=math.pi / 3, t1_len=2.0, t2_len=3.0)
origin = CameraPose(position=Vec3(0.0, 0.0, 0.0))
print(f"  model: t1*t2 = {model.t1_len * model.t2_len}")
print(f"  {'||dz||^2':>10} {'closed form':>12} {'monte carlo':>12}")
for d in (0.5, 1.0, 1.5, 2.0):
    other = CameraPose(position=Vec3(d, 0.0, 0.0))
    cf = pixel_distance_closed_form(origin, other, model)
    mc = pixel_distance_monte_carlo(origin, other, model, n_ray_pairs=100_000, n_quad=32, seed=1)
    print(f"  {d * d:>10.2f} {cf:>12.4f} {mc:>12.4f}")
print("  (the Monte-Carlo column is the closed form shifted by one constant)")

print()
print("== distance to a reference set = distance to the nearest reference ==")
refs = [
    ViewRecord(id="left", pose=CameraPose(position=Vec3(0, 0, 0))),
    ViewRecord(id="right", pose=CameraPose(position=Vec3(10, 0, 0))),
]
view = ViewRecord(id="probe", pose=CameraPose(position=Vec3(3, 0, 0)))
d = set_distance(view, refs, DistanceMetric.euclidean(), model)
print(f"  probe at x=3 between refs at 0 and 10 -> set distance {d}")
