#!/usr/bin/env python3
"""Run all three numerical certificates at reduced scale.

1. The ray-ensemble distance is affine in squared camera separation with
   slope t1*t2 (verified by Monte-Carlo sampling plus a least-squares fit).
2. Greedy max-min selection achieves at least half the exhaustive optimum.
3. Rendered colors move at most 3L times as fast as the camera position,
   where L is the scene's certified Lipschitz constant.

The acceptance suite (tests/test_acceptance.py) runs the same batteries at
full strength.
"""

import math
import time

from viewplan import RayModel
from viewplan.scenes import gradient_scene
from viewplan.verify import affine_law_battery, color_bound_battery, greedy_ratio_battery

model = RayModel(theta_low=0.0, theta_high=math.pi / 3, t1_len=2.0, t2_len=3.0)

start = time.perf_counter()
one = affine_law_battery(model, n_pairs=8, n_ray_pairs=50_000, n_quad=32, seed=0)
print(f"[affine law]  slope {one.slope:.4f} vs {one.expected_slope}  "
      f"r^2 {one.r_squared:.6f}  intercept {one.intercept:.4f}  "
      f"-> {'pass' if one.passed else 'fail'}  ({time.perf_counter() - start:.2f}s)")

start = time.perf_counter()
two = greedy_ratio_battery(n_instances=200, pool=12, count=4, seed=0)
print(f"[greedy/2-opt] min ratio {two.min_ratio:.4f}  mean {two.mean_ratio:.4f}  "
      f"violations {two.violations}  -> {'pass' if two.passed else 'fail'}  "
      f"({time.perf_counter() - start:.2f}s)")

start = time.perf_counter()
three = color_bound_battery(gradient_scene(1.0), n_pairs=60, seed=0)
print(f"[color bound] max ratio {three.max_ratio:.4f} <= {three.bound}  "
      f"-> {'pass' if three.passed else 'fail'}  ({time.perf_counter() - start:.2f}s)")
