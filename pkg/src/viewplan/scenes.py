"""Analytic density/color fields with certified Lipschitz constants.

Real radiance fields are neural networks whose Lipschitz constants are
unknowable; these scenes are analytic stand-ins whose constants can be
derived by hand and re-checked by randomized probing, which is what makes
the color-difference bound testable at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True, eq=False)
class SyntheticScene:
    """Analytic sigma(x) and c(x, d) plus a joint Lipschitz bound.

    ``lipschitz_const`` must bound all three variations:
    |sigma(x)-sigma(y)| <= L||x-y||, ||c(x,d)-c(y,d)|| <= L||x-y|| and
    ||c(x,d)-c(x,e)|| <= L||d-e||.  ``bounds`` is the cubic probing/posing
    domain (lo, hi per axis).
    """

    name: str
    sigma: Callable[[np.ndarray], np.ndarray]
    color: Callable[[np.ndarray, np.ndarray], np.ndarray]
    lipschitz_const: float
    bounds: tuple = (-1.5, 1.5)


def uniform_scene(density: float = 1.0, name: str | None = None) -> SyntheticScene:
    """Constant density and white color; both fields have zero variation."""
    if density < 0:
        raise ValueError("density must be nonnegative")

    def sigma(x: np.ndarray) -> np.ndarray:
        return np.full(x.shape[:-1], float(density))

    def color(x: np.ndarray, d: np.ndarray) -> np.ndarray:
        return np.ones(np.broadcast_shapes(x.shape, d.shape))

    return SyntheticScene(
        name=name or f"uniform(s0={density})",
        sigma=sigma,
        color=color,
        lipschitz_const=0.0,
    )


def ball_scene(s0: float = 1.0) -> SyntheticScene:
    """Density cone s0*max(0, 1-||x||) with constant white color; L = s0."""
    if s0 <= 0:
        raise ValueError("s0 must be positive")

    def sigma(x: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(x, axis=-1)
        return s0 * np.maximum(0.0, 1.0 - r)

    def color(x: np.ndarray, d: np.ndarray) -> np.ndarray:
        return np.ones(np.broadcast_shapes(x.shape, d.shape))

    return SyntheticScene(
        name=f"ball(s0={s0})",
        sigma=sigma,
        color=color,
        lipschitz_const=float(s0),
    )


def gradient_scene(s0: float = 1.0) -> SyntheticScene:
    """Ball density with smoothly varying, direction-dependent color.

    c_k(x, d) = 1/2 + tanh(x_k)/4 + tanh(d_k)/4 stays in [0, 1]; each tanh
    term is 1/4-Lipschitz, so max(s0, 1/2) certifies the joint constant with
    margin.
    """
    if s0 <= 0:
        raise ValueError("s0 must be positive")
    base = ball_scene(s0)

    def color(x: np.ndarray, d: np.ndarray) -> np.ndarray:
        return 0.5 + 0.25 * np.tanh(x) + 0.25 * np.tanh(d)

    return SyntheticScene(
        name=f"gradient(s0={s0})",
        sigma=base.sigma,
        color=color,
        lipschitz_const=max(float(s0), 0.5),
    )


SCENES: dict[str, Callable[[], SyntheticScene]] = {
    "empty": lambda: uniform_scene(0.0, name="empty"),
    "uniform": lambda: uniform_scene(1.0),
    "ball": lambda: ball_scene(1.0),
    "gradient": lambda: gradient_scene(1.0),
}


def make_scene(name: str) -> SyntheticScene:
    if name not in SCENES:
        raise ValueError(f"unknown scene {name!r}; available: {sorted(SCENES)}")
    return SCENES[name]()


@dataclass(frozen=True)
class LipschitzProbe:
    """Max finite-difference ratios observed while probing a scene."""

    sigma_ratio: float
    color_position_ratio: float
    color_direction_ratio: float
    lipschitz_const: float
    ok: bool


def _random_unit(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def certify_lipschitz(
    scene: SyntheticScene, n_pairs: int = 10_000, seed: int = 0
) -> LipschitzProbe:
    """Probe random point/direction pairs for Lipschitz violations.

    Passes when no observed difference quotient exceeds the scene's declared
    constant beyond 1e-9 relative slack.
    """
    rng = np.random.default_rng(seed)
    lo, hi = scene.bounds
    x = rng.uniform(lo, hi, size=(n_pairs, 3))
    y = rng.uniform(lo, hi, size=(n_pairs, 3))
    d = _random_unit(rng, n_pairs)
    e = _random_unit(rng, n_pairs)

    dist_xy = np.linalg.norm(x - y, axis=1)
    keep = dist_xy > 1e-12
    sigma_ratio = float(
        (np.abs(scene.sigma(x) - scene.sigma(y))[keep] / dist_xy[keep]).max(initial=0.0)
    )
    color_pos = np.linalg.norm(scene.color(x, d) - scene.color(y, d), axis=1)
    color_pos_ratio = float((color_pos[keep] / dist_xy[keep]).max(initial=0.0))
    dist_de = np.linalg.norm(d - e, axis=1)
    keep_d = dist_de > 1e-12
    color_dir = np.linalg.norm(scene.color(x, d) - scene.color(x, e), axis=1)
    color_dir_ratio = float((color_dir[keep_d] / dist_de[keep_d]).max(initial=0.0))

    limit = scene.lipschitz_const * (1.0 + 1e-9)
    ok = max(sigma_ratio, color_pos_ratio, color_dir_ratio) <= limit
    return LipschitzProbe(
        sigma_ratio=sigma_ratio,
        color_position_ratio=color_pos_ratio,
        color_direction_ratio=color_dir_ratio,
        lipschitz_const=scene.lipschitz_const,
        ok=ok,
    )
