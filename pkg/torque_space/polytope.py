"""
Feasible joint-torque polytope of a tendon-driven joint.

Every vertex of the tension box [f_min, f_max]^M is mapped through
tau = -G^T f; the convex hull of the images is the torque polytope, and the
largest ball centred at the origin that fits inside it measures how well the
joint can resist a disturbance in any direction.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from mechanism.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

MAX_WIRES = 12
DEGENERATE_VOLUME = 1e-10
# origin closer than this to a facet plane counts as lying on it
ON_FACET_TOL = 1e-12


class DegenerateHull(ValueError):
    """Raised when the projected points do not span the torque space"""


@dataclass(frozen=True)
class TensionBounds:
    f_min: float
    f_max: float

    def __post_init__(self):
        if not 0.0 <= self.f_min < self.f_max:
            raise ConfigurationError(f"Tension bounds need 0 <= f_min < f_max, got [{self.f_min}, {self.f_max}]")


@dataclass(frozen=True)
class TorquePolytope:
    """
    Convex hull in D-dimensional torque space.

    normals[i] . x <= offsets[i] holds for every point of the hull; normals are
    unit length and point outwards.
    """
    dimension: int
    vertices: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray
    volume: float

    @property
    def facets(self) -> list[tuple[np.ndarray, float]]:
        return list(zip(self.normals, self.offsets))

    def contains(self, point, tol: float = 1e-9) -> bool:
        return bool(np.all(self.normals @ np.asarray(point, dtype=float) <= self.offsets + tol))


@dataclass(frozen=True)
class TorqueScore:
    origin_interior: bool
    radius: float


def tension_vertices(wire_count: int, bounds: TensionBounds) -> np.ndarray:
    """All 2^M corners of the tension box, in binary-counter order (last wire fastest)"""
    if not 1 <= wire_count <= MAX_WIRES:
        raise ConfigurationError(f"Tension box is enumerated for 1..{MAX_WIRES} wires, got {wire_count}")
    levels = (bounds.f_min, bounds.f_max)
    return np.array(list(itertools.product(levels, repeat=wire_count)), dtype=float)


def project_to_torque(jacobian, tensions) -> np.ndarray:
    """tau = -G^T f. `tensions` may be a single M-vector or a stack of shape (K, M)"""
    jacobian = np.asarray(jacobian, dtype=float)
    tensions = np.asarray(tensions, dtype=float)
    if tensions.shape[-1] != jacobian.shape[0]:
        raise ConfigurationError(f"Tension vector has {tensions.shape[-1]} entries, Jacobian has {jacobian.shape[0]} rows")
    return -(tensions @ jacobian)


def build_hull(points) -> TorquePolytope:
    """Convex hull of D-dimensional points (D in {2, 3}) with outward unit facet normals"""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] not in (2, 3):
        raise ConfigurationError(f"Hull points must have shape (K, 2) or (K, 3), got {points.shape}")
    dimension = points.shape[1]
    if points.shape[0] < dimension + 1:
        raise DegenerateHull(f"{points.shape[0]} points cannot span {dimension} dimensions")
    try:
        hull = ConvexHull(points)
    except QhullError as exc:
        raise DegenerateHull(f"Torque points are affinely dependent: {exc}") from exc
    if hull.volume < DEGENERATE_VOLUME:
        raise DegenerateHull(f"Torque hull volume {hull.volume:.3e} is below {DEGENERATE_VOLUME}")

    normals = hull.equations[:, :-1]
    offsets = -hull.equations[:, -1]
    centroid = points[hull.vertices].mean(axis=0)
    if np.any(normals @ centroid > offsets):
        raise DegenerateHull("Facet orientation check against the centroid failed")
    return TorquePolytope(
        dimension=dimension,
        vertices=points[hull.vertices],
        normals=normals,
        offsets=offsets,
        volume=float(hull.volume),
    )


def inscribed_radius(hull: TorquePolytope | DegenerateHull | None, r_min: float, sphere_center=None) -> TorqueScore:
    """
    Radius of the largest ball around `sphere_center` (the origin by default)
    inside the hull, or `r_min` when the centre is not strictly inside.

    A missing hull or a DegenerateHull in its place also scores `r_min`.
    """
    if hull is None or isinstance(hull, DegenerateHull):
        return TorqueScore(False, r_min)
    center = np.zeros(hull.dimension) if sphere_center is None else np.asarray(sphere_center, dtype=float)
    signed = hull.normals @ center - hull.offsets
    if signed.max() >= -ON_FACET_TOL:
        return TorqueScore(False, r_min)
    return TorqueScore(True, float(np.abs(signed).min()))


def torque_score(jacobian, bounds: TensionBounds, r_min: float, sphere_center=None) -> tuple[TorqueScore, TorquePolytope | None]:
    """Score one posture: project the tension box through G and measure the inscribed ball"""
    jacobian = np.asarray(jacobian, dtype=float)
    torques = project_to_torque(jacobian, tension_vertices(jacobian.shape[0], bounds))
    try:
        hull = build_hull(torques)
    except DegenerateHull as exc:
        logger.debug(f"Torque space is flat, scoring R_min: {exc}")
        hull = None
    return inscribed_radius(hull, r_min, sphere_center), hull
