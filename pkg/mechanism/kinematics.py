"""
Forward kinematics of the two-link mechanism.

Frame convention: the base disc lies in the plane z=0 centred on the origin,
the base link runs along +z to the joint centre (0, 0, L), and at zero joint
angles the moving disc sits at z=2L. Moving-disc anchors are rigidly attached
to the moving link and rotate about the joint centre by
R = R_z(yaw) @ R_y(pitch) @ R_x(roll).
"""
from __future__ import annotations

import logging

import numpy as np

from geometry.proximity import Segment

from .exceptions import ConfigurationError
from .types import ANCHOR_DISCS, DesignParams, MechanismConfig, WirePath

logger = logging.getLogger(__name__)

# segments shorter than this contribute nothing to the Jacobian
MIN_SEGMENT_LENGTH = 1e-12


def _rot_x(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _rot_y(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _rot_z(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _d_rot_x(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[0.0, 0.0, 0.0], [0.0, -s, -c], [0.0, c, -s]])


def _d_rot_y(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[-s, 0.0, c], [0.0, 0.0, 0.0], [-c, 0.0, -s]])


def _d_rot_z(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[-s, -c, 0.0], [c, -s, 0.0], [0.0, 0.0, 0.0]])


# composition order, outermost factor first
_FACTORS = (('yaw', _rot_z, _d_rot_z), ('pitch', _rot_y, _d_rot_y), ('roll', _rot_x, _d_rot_x))


def _joint_angles(cfg: MechanismConfig, q) -> dict[str, float]:
    q = np.asarray(q, dtype=float).reshape(-1)
    if q.shape != (cfg.dof_count,):
        raise ConfigurationError(f"Expected {cfg.dof_count} joint angles, got {q.shape[0]}")
    return dict(zip(cfg.joint_axes, q))


def joint_rotation(cfg: MechanismConfig, q) -> np.ndarray:
    """Rotation of the moving link for joint angles `q` (ordered as cfg.joint_axes)"""
    angles = _joint_angles(cfg, q)
    rotation = np.eye(3)
    for axis, rot, _ in _FACTORS:
        if axis in angles:
            rotation = rotation @ rot(angles[axis])
    return rotation


def joint_rotation_derivatives(cfg: MechanismConfig, q) -> list[np.ndarray]:
    """dR/dq_j for every joint, in cfg.joint_axes order"""
    angles = _joint_angles(cfg, q)
    derivatives = {}
    for axis in angles:
        rotation = np.eye(3)
        for factor_axis, rot, d_rot in _FACTORS:
            if factor_axis not in angles:
                continue
            matrix = d_rot(angles[factor_axis]) if factor_axis == axis else rot(angles[factor_axis])
            rotation = rotation @ matrix
        derivatives[axis] = rotation
    return [derivatives[axis] for axis in cfg.joint_axes]


def decode_genome(genome, cfg: MechanismConfig) -> DesignParams:
    """
    Map a genome in [-1, 1]^(2NM) onto disc coordinates.

    Consecutive (u, v) pairs become p_x = u*R and p_y = v*sqrt(R^2 - p_x^2), so
    every decoded anchor satisfies p_x^2 + p_y^2 <= R^2 by construction.
    """
    values = np.asarray(genome, dtype=float).reshape(-1)
    if values.shape[0] != cfg.genome_length:
        raise ConfigurationError(f"Genome has {values.shape[0]} values, configuration expects {cfg.genome_length}")
    if np.any(np.abs(values) > 1.0) or not np.all(np.isfinite(values)):
        raise ConfigurationError("Genome values must lie in [-1, 1]")
    pairs = values.reshape(cfg.wire_count, cfg.points_per_wire, 2)
    radius = cfg.disc_radius
    p_x = pairs[..., 0] * radius
    p_y = pairs[..., 1] * np.sqrt(np.maximum(radius * radius - p_x * p_x, 0.0))
    return DesignParams(np.stack([p_x, p_y], axis=-1))


def encode_design(design: DesignParams, cfg: MechanismConfig) -> np.ndarray:
    """Inverse of decode_genome; v is 0 where the chord collapses at |p_x| = R"""
    design.check(cfg)
    radius = cfg.disc_radius
    p_x = design.points[..., 0]
    p_y = design.points[..., 1]
    u = np.clip(p_x / radius, -1.0, 1.0)
    half_chord = np.sqrt(np.maximum(radius * radius - p_x * p_x, 0.0))
    safe = np.where(half_chord > 0.0, half_chord, 1.0)
    v = np.where(half_chord > 0.0, np.clip(p_y / safe, -1.0, 1.0), 0.0)
    return np.stack([u, v], axis=-1).reshape(-1)


def _local_moving_anchor(cfg: MechanismConfig, point) -> np.ndarray:
    """Moving-disc anchor relative to the joint centre at zero joint angles"""
    return np.array([point[0], point[1], cfg.link_length])


def anchor_world_positions(cfg: MechanismConfig, design: DesignParams, q) -> list[WirePath]:
    """World-frame wire polylines at joint angles `q`"""
    rotation = joint_rotation(cfg, q)
    center = cfg.joint_center
    paths = []
    for i, wire in enumerate(design.points):
        anchors = []
        for j, point in enumerate(wire):
            if ANCHOR_DISCS[j] == 'base':
                anchors.append(np.array([point[0], point[1], 0.0]))
            else:
                anchors.append(center + rotation @ _local_moving_anchor(cfg, point))
        paths.append(WirePath(i, tuple(anchors)))
    return paths


def link_segments(cfg: MechanismConfig, q) -> tuple[Segment, Segment]:
    """Link axes: base disc centre to joint centre, joint centre to moving disc centre"""
    center = cfg.joint_center
    moving_center = center + joint_rotation(cfg, q) @ np.array([0.0, 0.0, cfg.link_length])
    return Segment(np.zeros(3), center), Segment(center, moving_center)


def wire_lengths(cfg: MechanismConfig, design: DesignParams, q) -> np.ndarray:
    """Polyline length of every wire, in metres"""
    return np.array([path.length for path in anchor_world_positions(cfg, design, q)])


def muscle_jacobian(cfg: MechanismConfig, design: DesignParams, q) -> np.ndarray:
    """
    G[i, j] = d(length of wire i) / d(q_j), shape (M, D).

    Each segment contributes its unit vector dotted with the relative velocity
    of its endpoints under a unit rate of joint j; base anchors never move.
    """
    derivatives = joint_rotation_derivatives(cfg, q)
    paths = anchor_world_positions(cfg, design, q)
    jacobian = np.zeros((design.wire_count, cfg.dof_count))
    for path, wire in zip(paths, design.points):
        velocities = []
        for j, point in enumerate(wire):
            if ANCHOR_DISCS[j] == 'base':
                velocities.append(np.zeros((cfg.dof_count, 3)))
            else:
                local = _local_moving_anchor(cfg, point)
                velocities.append(np.array([d_rot @ local for d_rot in derivatives]))
        for j, segment in enumerate(path.segments):
            length = segment.length
            if length < MIN_SEGMENT_LENGTH:
                continue
            unit = segment.direction / length
            jacobian[path.wire_index] += (velocities[j + 1] - velocities[j]) @ unit
    return jacobian


def fold_design(design: DesignParams) -> DesignParams:
    """Turn an N=2 design into the exact-fold N=3 design (end anchor = start anchor)"""
    if design.points_per_wire != 2:
        raise ConfigurationError(f"Only two-point wires can be folded, got {design.points_per_wire} points")
    return DesignParams(np.concatenate([design.points, design.points[:, :1]], axis=1))


def link_contacts(cfg: MechanismConfig, design: DesignParams) -> list[dict]:
    """
    Anchors touching a link axis: at a disc centre, or closer to it than
    cfg.link_clearance when a clearance is configured.
    """
    contacts = []
    radii = np.linalg.norm(design.points, axis=2)
    for wire, point in np.argwhere((radii <= MIN_SEGMENT_LENGTH) | (radii < cfg.link_clearance)):
        contacts.append({
            'wire': int(wire),
            'anchor': int(point),
            'disc': ANCHOR_DISCS[point],
            'radius': float(radii[wire, point]),
        })
    if contacts:
        logger.warning(f"{len(contacts)} anchor(s) touch a link axis")
    return contacts
