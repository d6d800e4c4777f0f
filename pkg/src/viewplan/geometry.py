"""Geometric primitives shared by every other module.

Coordinate convention is right-handed with z up; elevation/azimuth angles
(theta, phi) map to the unit vector (cos(theta)cos(phi), cos(theta)sin(phi),
sin(theta)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional

import numpy as np

if TYPE_CHECKING:
    from .distances import FeatureVector

VIEW_STATUSES = ("training", "candidate", "acquired")

_ROTATION_TOL = 1e-6


@dataclass(frozen=True)
class Vec3:
    """A point or direction in scene units."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        for name in ("x", "y", "z"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"Vec3.{name} must be finite, got {v!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_array(cls, arr) -> "Vec3":
        a = np.asarray(arr, dtype=float)
        if a.shape != (3,):
            raise ValueError(f"expected shape (3,), got {a.shape}")
        return cls(float(a[0]), float(a[1]), float(a[2]))

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)


@dataclass(frozen=True)
class DirectionAngles:
    """Elevation theta and azimuth phi of a ray direction, in radians."""

    theta: float
    phi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise ValueError("angles must be finite")
        if not -math.pi / 2 <= self.theta <= math.pi / 2:
            raise ValueError(f"theta {self.theta} outside [-pi/2, pi/2]")
        if not 0.0 <= self.phi < 2 * math.pi:
            raise ValueError(f"phi {self.phi} outside [0, 2*pi)")


@dataclass(frozen=True, eq=False)
class CameraPose:
    """Camera center plus an optional world-from-camera rotation.

    Every distance measure depends only on ``position``; the rotation is
    needed only to generate pixel rays when rendering.
    """

    position: Vec3
    rotation: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.rotation is not None:
            r = np.asarray(self.rotation, dtype=float)
            if r.shape != (3, 3):
                raise ValueError(f"rotation must be 3x3, got {r.shape}")
            err = np.abs(r.T @ r - np.eye(3)).max()
            if err > _ROTATION_TOL:
                raise ValueError(f"rotation not orthonormal (max entry error {err:.3g})")
            det = float(np.linalg.det(r))
            if abs(det - 1.0) > _ROTATION_TOL:
                raise ValueError(f"rotation determinant {det} != 1")
            r = r.copy()
            r.setflags(write=False)
            object.__setattr__(self, "rotation", r)


@dataclass(frozen=True)
class Ray:
    """Parametric ray origin + t * direction with a unit direction."""

    origin: Vec3
    direction: Vec3

    def __post_init__(self) -> None:
        n = self.direction.norm()
        if abs(n - 1.0) > 1e-9:
            raise ValueError(f"ray direction norm {n} not within 1e-9 of 1")


@dataclass(frozen=True)
class ViewRecord:
    """One camera view: id, pose, optional semantic feature, and status."""

    id: str
    pose: CameraPose
    feature: Optional["FeatureVector"] = None
    status: str = "candidate"

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("view id must be nonempty")
        if self.status not in VIEW_STATUSES:
            raise ValueError(f"status {self.status!r} not one of {VIEW_STATUSES}")


def direction_from_angles(angles: DirectionAngles) -> Vec3:
    """Unit direction (cos t cos p, cos t sin p, sin t) for elevation/azimuth."""
    ct = math.cos(angles.theta)
    return Vec3(ct * math.cos(angles.phi), ct * math.sin(angles.phi), math.sin(angles.theta))


def ray_point(ray: Ray, t: float) -> Vec3:
    """Point origin + t * direction for nonnegative t."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    o, d = ray.origin, ray.direction
    return Vec3(o.x + t * d.x, o.y + t * d.y, o.z + t * d.z)


def check_unique_ids(views) -> None:
    """Reject duplicate ids within one working set of views."""
    seen = set()
    for v in views:
        if v.id in seen:
            raise ValueError(f"duplicate view id {v.id!r}")
        seen.add(v.id)
