"""
Value types describing the two-link mechanism and a wire arrangement on it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from geometry.proximity import Segment

from .exceptions import ConfigurationError

JOINT_AXES = ('roll', 'pitch', 'yaw')
# base disc, moving disc, and back to the base disc for fold wires
ANCHOR_DISCS = ('base', 'moving', 'base')
DISC_TOLERANCE = 1e-12


@dataclass(frozen=True)
class MechanismConfig:
    """Link geometry and wire layout of the mechanism"""
    disc_radius: float
    link_length: float
    joint_axes: tuple[str, ...]
    wire_count: int
    points_per_wire: int
    link_clearance: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, 'joint_axes', tuple(self.joint_axes))
        if not self.disc_radius > 0:
            raise ConfigurationError(f"disc_radius must be positive, got {self.disc_radius}")
        if not self.link_length > 0:
            raise ConfigurationError(f"link_length must be positive, got {self.link_length}")
        if self.wire_count < 1:
            raise ConfigurationError(f"wire_count must be at least 1, got {self.wire_count}")
        if self.points_per_wire not in (2, 3):
            raise ConfigurationError(f"points_per_wire must be 2 or 3, got {self.points_per_wire}")
        if self.dof_count not in (2, 3):
            raise ConfigurationError(f"Joint must have 2 or 3 axes, got {list(self.joint_axes)}")
        unknown = [axis for axis in self.joint_axes if axis not in JOINT_AXES]
        if unknown or len(set(self.joint_axes)) != len(self.joint_axes):
            raise ConfigurationError(f"joint_axes must be distinct labels from {JOINT_AXES}, got {list(self.joint_axes)}")
        if self.link_clearance < 0:
            raise ConfigurationError(f"link_clearance must be non-negative, got {self.link_clearance}")

    @property
    def dof_count(self) -> int:
        return len(self.joint_axes)

    @property
    def genome_length(self) -> int:
        return 2 * self.points_per_wire * self.wire_count

    @property
    def joint_center(self) -> np.ndarray:
        return np.array([0.0, 0.0, self.link_length])

    def with_points_per_wire(self, points_per_wire: int) -> 'MechanismConfig':
        return MechanismConfig(
            self.disc_radius, self.link_length, self.joint_axes,
            self.wire_count, points_per_wire, self.link_clearance,
        )


@dataclass(frozen=True)
class DesignParams:
    """Disc coordinates (p_x, p_y) of every wire anchor, shape (M, N, 2)"""
    points: np.ndarray

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        if points.ndim != 3 or points.shape[2] != 2:
            raise ConfigurationError(f"Design points must have shape (M, N, 2), got {points.shape}")
        points.setflags(write=False)
        object.__setattr__(self, 'points', points)

    @property
    def wire_count(self) -> int:
        return self.points.shape[0]

    @property
    def points_per_wire(self) -> int:
        return self.points.shape[1]

    def check(self, cfg: MechanismConfig) -> None:
        """Raise ConfigurationError unless the design fits `cfg`"""
        expected = (cfg.wire_count, cfg.points_per_wire, 2)
        if self.points.shape != expected:
            raise ConfigurationError(f"Design has shape {self.points.shape}, configuration expects {expected}")
        if not np.all(np.isfinite(self.points)):
            raise ConfigurationError("Design coordinates must be finite")
        radius_sq = np.sum(self.points ** 2, axis=2)
        limit = cfg.disc_radius ** 2 * (1.0 + DISC_TOLERANCE)
        if np.any(radius_sq > limit):
            wire, point = np.argwhere(radius_sq > limit)[0]
            raise ConfigurationError(f"Anchor {point} of wire {wire} lies outside the disc of radius {cfg.disc_radius}")

    def permuted(self, order) -> 'DesignParams':
        return DesignParams(self.points[list(order)])


@dataclass(frozen=True)
class WirePath:
    """World-frame anchors of one wire at one joint configuration"""
    wire_index: int
    anchors: tuple[np.ndarray, ...]
    segments: tuple[Segment, ...] = field(init=False)

    def __post_init__(self):
        anchors = tuple(np.asarray(anchor, dtype=float) for anchor in self.anchors)
        object.__setattr__(self, 'anchors', anchors)
        object.__setattr__(self, 'segments', tuple(
            Segment(anchors[j], anchors[j + 1]) for j in range(len(anchors) - 1)
        ))

    @property
    def length(self) -> float:
        return float(sum(segment.length for segment in self.segments))
