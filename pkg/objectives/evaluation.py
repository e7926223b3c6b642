from __future__ import annotations

import logging
import math

from mechanism.exceptions import ConfigurationError
from mechanism.kinematics import link_contacts, muscle_jacobian
from mechanism.types import DesignParams, MechanismConfig
from torque_space.polytope import TensionBounds, torque_score

from .crossings import count_crossings_segment, detector_options
from .types import Evaluation, Trajectory

logger = logging.getLogger(__name__)


def validate_design(cfg: MechanismConfig, design: DesignParams) -> list[dict]:
    """Check `design` against `cfg` and return the anchors that touch a link axis"""
    design.check(cfg)
    return link_contacts(cfg, design)


def evaluate(
    cfg: MechanismConfig,
    design: DesignParams,
    traj: Trajectory,
    bounds: TensionBounds,
    epsilon: float,
    r_min: float,
    sphere_center=None,
    **options,
) -> Evaluation:
    """
    Score a design over a trajectory.

    Crossings are counted over the interpolated motion of every trajectory
    step; torque capability is measured only at the waypoints.
    """
    if traj.dof_count != cfg.dof_count:
        raise ConfigurationError(f"Trajectory has {traj.dof_count} joint angles per waypoint, mechanism has {cfg.dof_count}")
    if not epsilon > 0 or not r_min > 0:
        raise ConfigurationError(f"epsilon and r_min must be positive, got {epsilon} and {r_min}")
    options = options or detector_options()

    per_segment = [
        count_crossings_segment(cfg, design, traj.waypoints[i], traj.waypoints[j], epsilon, **options)
        for i, j in traj.steps
    ]
    radii = []
    for q in traj.waypoints:
        score, _ = torque_score(muscle_jacobian(cfg, design, q), bounds, r_min, sphere_center)
        radii.append(score.radius)

    evaluation = Evaluation(
        e_cross=int(sum(per_segment)),
        log_e_torque=math.fsum(math.log(radius) for radius in radii),
        per_segment_crossings=per_segment,
        per_waypoint_radius=radii,
    )
    logger.debug(f"Evaluated design: E_cross={evaluation.e_cross}, ln E_torque={evaluation.log_e_torque:.6f}")
    return evaluation
