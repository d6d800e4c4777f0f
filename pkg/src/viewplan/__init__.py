"""viewplan: information-driven camera view selection with certificates.

A numpy library for scoring candidate camera views by semantic and pixel
distance, selecting maximally separated subsets with a near-optimal greedy
algorithm, rendering analytic volumes, and numerically certifying the
guarantees those pieces rely on.
"""

from .distances import (
    DistanceMetric,
    FeatureVector,
    RayModel,
    fit_affine_relation,
    pixel_distance_closed_form,
    pixel_distance_monte_carlo,
    semantic_distance,
    set_distance,
)
from .geometry import (
    CameraPose,
    DirectionAngles,
    Ray,
    Vec3,
    ViewRecord,
    direction_from_angles,
    ray_point,
)
from .renderer import (
    ColorImage,
    RenderConfig,
    l_macro,
    l_micro_pairwise,
    l_micro_variance,
    lipschitz_bound_check,
    nerf_photometric_loss,
    render_image,
    render_ray,
)
from .scenes import SyntheticScene, ball_scene, certify_lipschitz, gradient_scene, make_scene, uniform_scene
from .selection import (
    ActiveLoopResult,
    OracleResult,
    RoundSchedule,
    SelectionResult,
    approximation_ratio,
    baseline_select,
    brute_force_optimal,
    greedy_select,
    run_active_loop,
    select_with_strategy,
    sequential_select,
)

__version__ = "0.1.0"

__all__ = [
    "ActiveLoopResult",
    "CameraPose",
    "ColorImage",
    "DirectionAngles",
    "DistanceMetric",
    "FeatureVector",
    "OracleResult",
    "Ray",
    "RayModel",
    "RenderConfig",
    "RoundSchedule",
    "SelectionResult",
    "SyntheticScene",
    "Vec3",
    "ViewRecord",
    "approximation_ratio",
    "ball_scene",
    "baseline_select",
    "brute_force_optimal",
    "certify_lipschitz",
    "direction_from_angles",
    "fit_affine_relation",
    "gradient_scene",
    "greedy_select",
    "l_macro",
    "l_micro_pairwise",
    "l_micro_variance",
    "lipschitz_bound_check",
    "make_scene",
    "nerf_photometric_loss",
    "pixel_distance_closed_form",
    "pixel_distance_monte_carlo",
    "ray_point",
    "render_image",
    "render_ray",
    "run_active_loop",
    "select_with_strategy",
    "semantic_distance",
    "sequential_select",
    "set_distance",
    "uniform_scene",
]
