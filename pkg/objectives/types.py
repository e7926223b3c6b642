from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from mechanism.exceptions import ConfigurationError


@dataclass(frozen=True)
class Trajectory:
    """Joint-angle waypoints in radians, shape (N_traj, D)"""
    waypoints: np.ndarray
    close_loop: bool = False

    def __post_init__(self):
        waypoints = np.array(self.waypoints, dtype=float)
        if waypoints.ndim != 2 or waypoints.shape[0] < 2:
            raise ConfigurationError(f"A trajectory needs at least two waypoints, got shape {waypoints.shape}")
        if not np.all(np.isfinite(waypoints)):
            raise ConfigurationError("Trajectory angles must be finite")
        waypoints.setflags(write=False)
        object.__setattr__(self, 'waypoints', waypoints)

    @classmethod
    def from_degrees(cls, waypoints, close_loop: bool = False) -> 'Trajectory':
        return cls(np.radians(np.asarray(waypoints, dtype=float)), close_loop)

    @property
    def dof_count(self) -> int:
        return self.waypoints.shape[1]

    def __len__(self):
        return self.waypoints.shape[0]

    @property
    def steps(self) -> list[tuple[int, int]]:
        """Waypoint index pairs (i, i+1), plus the wrap-around step when close_loop is set"""
        count = len(self)
        steps = [(i, i + 1) for i in range(count - 1)]
        if self.close_loop:
            steps.append((count - 1, 0))
        return steps

    def reversed(self) -> 'Trajectory':
        return Trajectory(self.waypoints[::-1], self.close_loop)


@dataclass(frozen=True)
class CheckPair:
    """
    Two segments checked against each other for crossings.

    `first` is a (wire, segment) index. `second` is another (wire, segment)
    index or the name of a link axis ('base' or 'moving'). Joined pairs are
    the two segments of a fold wire; they meet at the relay anchor. Forced
    pairs sit inside the link clearance and count as crossed on every step.
    """
    first: tuple[int, int]
    second: tuple[int, int] | str
    joined: bool = False
    forced: bool = False

    @property
    def kind(self) -> str:
        if isinstance(self.second, str):
            return 'link'
        return 'fold' if self.joined else 'wire'

    def label(self) -> str:
        first = f"w{self.first[0]}s{self.first[1]}"
        if isinstance(self.second, str):
            return f"{first}-{self.second}_link"
        return f"{first}-w{self.second[0]}s{self.second[1]}"


@dataclass(frozen=True)
class Evaluation:
    e_cross: int
    log_e_torque: float
    per_segment_crossings: list[int] = field(default_factory=list)
    per_waypoint_radius: list[float] = field(default_factory=list)
    link_contacts: list[dict] = field(default_factory=list)

    @property
    def e_torque(self) -> float | None:
        """E_torque itself, or None when it underflows to zero or overflows a float"""
        try:
            value = math.exp(self.log_e_torque)
        except OverflowError:
            return None
        return value if value > 0.0 else None

    @property
    def objectives(self) -> tuple[float, float]:
        """Minimization-oriented objective vector (E_cross, -ln E_torque)"""
        return float(self.e_cross), -self.log_e_torque

    def as_dict(self) -> dict:
        return {
            'e_cross': self.e_cross,
            'log_e_torque': self.log_e_torque,
            'e_torque': self.e_torque,
            'per_segment_crossings': list(self.per_segment_crossings),
            'per_waypoint_radius': list(self.per_waypoint_radius),
            'link_contacts': list(self.link_contacts),
        }
