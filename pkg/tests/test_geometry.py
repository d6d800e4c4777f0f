import math

import numpy as np
import pytest

from viewplan.geometry import (
    CameraPose,
    DirectionAngles,
    Ray,
    Vec3,
    ViewRecord,
    check_unique_ids,
    direction_from_angles,
    ray_point,
)


class TestVec3:
    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            Vec3(1.0, float("nan"), 0.0)
        with pytest.raises(ValueError):
            Vec3(float("inf"), 0.0, 0.0)

    def test_array_roundtrip(self):
        v = Vec3(1.5, -2.0, 0.25)
        assert Vec3.from_array(v.as_array()) == v


class TestDirectionAngles:
    def test_phi_range(self):
        with pytest.raises(ValueError):
            DirectionAngles(theta=0.0, phi=2 * math.pi)
        with pytest.raises(ValueError):
            DirectionAngles(theta=0.0, phi=-0.1)

    def test_theta_range(self):
        with pytest.raises(ValueError):
            DirectionAngles(theta=2.0, phi=0.0)


class TestDirectionFromAngles:
    @pytest.mark.parametrize(
        "theta,phi,expected",
        [
            (0.0, 0.0, (1.0, 0.0, 0.0)),
            (math.pi / 2, 0.0, (0.0, 0.0, 1.0)),
            (0.0, math.pi / 2, (0.0, 1.0, 0.0)),
        ],
    )
    def test_axis_cases(self, theta, phi, expected):
        d = direction_from_angles(DirectionAngles(theta=theta, phi=phi))
        np.testing.assert_allclose(d.as_array(), expected, atol=1e-15)

    def test_unit_norm_everywhere(self):
        rng = np.random.default_rng(42)
        for _ in range(500):
            theta = rng.uniform(-math.pi / 2, math.pi / 2)
            phi = rng.uniform(0.0, 2 * math.pi)
            d = direction_from_angles(DirectionAngles(theta=theta, phi=phi))
            assert abs(d.norm() - 1.0) <= 1e-9


class TestRayPoint:
    def test_t_zero_returns_origin(self):
        r = Ray(origin=Vec3(0, 0, 0), direction=Vec3(1, 0, 0))
        assert ray_point(r, 0.0) == Vec3(0, 0, 0)

    def test_linearity(self):
        r = Ray(origin=Vec3(0, 0, 0), direction=Vec3(1, 0, 0))
        assert ray_point(r, 2.0) == Vec3(2, 0, 0)

    def test_componentwise(self):
        r = Ray(origin=Vec3(1, 1, 1), direction=Vec3(0, 0, 1))
        assert ray_point(r, 0.5) == Vec3(1, 1, 1.5)

    def test_negative_t_rejected(self):
        r = Ray(origin=Vec3(0, 0, 0), direction=Vec3(1, 0, 0))
        with pytest.raises(ValueError):
            ray_point(r, -1e-9)

    def test_affine_in_t(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            d = rng.normal(size=3)
            d /= np.linalg.norm(d)
            r = Ray(origin=Vec3.from_array(rng.normal(size=3)), direction=Vec3.from_array(d))
            s, t = rng.uniform(0, 5, 2)
            lhs = ray_point(r, s + t).as_array() - ray_point(r, s).as_array()
            np.testing.assert_allclose(lhs, t * d, rtol=1e-12, atol=1e-12)

    def test_unit_direction_enforced(self):
        with pytest.raises(ValueError):
            Ray(origin=Vec3(0, 0, 0), direction=Vec3(1, 1, 0))


class TestCameraPose:
    def test_valid_rotation_accepted(self):
        pose = CameraPose(position=Vec3(0, 0, 0), rotation=np.eye(3))
        assert pose.rotation is not None
        assert not pose.rotation.flags.writeable

    def test_non_orthonormal_rejected(self):
        bad = np.eye(3)
        bad[0, 1] = 1e-3
        with pytest.raises(ValueError):
            CameraPose(position=Vec3(0, 0, 0), rotation=bad)

    def test_reflection_rejected(self):
        refl = np.diag([-1.0, 1.0, 1.0])
        with pytest.raises(ValueError):
            CameraPose(position=Vec3(0, 0, 0), rotation=refl)


class TestViewRecord:
    def test_status_validated(self):
        pose = CameraPose(position=Vec3(0, 0, 0))
        with pytest.raises(ValueError):
            ViewRecord(id="a", pose=pose, status="selected")

    def test_duplicate_ids_rejected(self):
        pose = CameraPose(position=Vec3(0, 0, 0))
        views = [ViewRecord(id="a", pose=pose), ViewRecord(id="a", pose=pose)]
        with pytest.raises(ValueError):
            check_unique_ids(views)
