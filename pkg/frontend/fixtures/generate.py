#!/usr/bin/env python3
"""Regenerate the frontend's image fixtures (deterministic).

Uses the viewplan renderer for scene images plus seeded noise; includes a
byte-identical duplicate pair and one deliberately truncated file so the
skip path stays covered.
"""

import shutil
from pathlib import Path

import numpy as np

from viewplan.io import parse_transforms, write_ppm
from viewplan.renderer import ColorImage, RenderConfig, render_image
from viewplan.scenes import make_scene

HERE = Path(__file__).resolve().parent
IMAGES = HERE / "images"
FIXTURES = HERE.parent.parent / "tests" / "fixtures"


def main() -> None:
    IMAGES.mkdir(parents=True, exist_ok=True)
    doc = parse_transforms(FIXTURES / "transforms_ring8.json")
    cfg = RenderConfig(n_samples=32)

    gradient = make_scene("gradient")
    ball = make_scene("ball")
    write_ppm(render_image(gradient, doc.views[0].pose, doc.camera_angle_x, 32, 24, cfg), IMAGES / "g0.ppm")
    write_ppm(render_image(gradient, doc.views[2].pose, doc.camera_angle_x, 32, 24, cfg), IMAGES / "g1.ppm")
    write_ppm(render_image(ball, doc.views[4].pose, doc.camera_angle_x, 32, 24, cfg), IMAGES / "ball.ppm")

    rng = np.random.default_rng(99)
    write_ppm(ColorImage.from_array(rng.uniform(0, 1, (24, 32, 3))), IMAGES / "noise.ppm")

    write_ppm(render_image(gradient, doc.views[6].pose, doc.camera_angle_x, 32, 24, cfg), IMAGES / "dup_a.ppm")
    shutil.copyfile(IMAGES / "dup_a.ppm", IMAGES / "dup_b.ppm")

    (IMAGES / "broken.ppm").write_bytes(b"P6\n32 24\n255\n\x00\x01")
    (IMAGES / "notes.txt").write_text("not an image; ignored by the folder scan\n")
    print(f"wrote fixtures to {IMAGES}")


if __name__ == "__main__":
    main()
