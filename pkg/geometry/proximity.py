"""
Closest-point queries between line segments in 3D.

Segments are parameterized as p_a(s) = a.start + s*u and p_b(t) = b.start + t*v
with s, t in [0, 1], u = a.end - a.start, v = b.end - b.start and
w = a.start - b.start.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# squared length under which a segment is treated as a point
ZERO_LENGTH_SQ = 1e-24
# relative size of ac - b^2 under which two segments are treated as parallel
PARALLEL_TOL = 1e-12


def as_point(values) -> np.ndarray:
    """Coerce a 3-sequence to a finite float array"""
    point = np.asarray(values, dtype=float).reshape(3)
    if not np.all(np.isfinite(point)):
        raise ValueError(f"Point coordinates must be finite, got {point}")
    return point


@dataclass(frozen=True)
class Segment:
    """Closed line segment between two Point3 values (numpy arrays of shape (3,))"""
    start: np.ndarray
    end: np.ndarray

    @classmethod
    def from_points(cls, start, end) -> 'Segment':
        return cls(as_point(start), as_point(end))

    @property
    def direction(self) -> np.ndarray:
        return self.end - self.start

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.end - self.start))

    def point_at(self, s: float) -> np.ndarray:
        return self.start + s * (self.end - self.start)

    def reversed(self) -> 'Segment':
        return Segment(self.end, self.start)


@dataclass(frozen=True)
class ProximityResult:
    s_star: float
    t_star: float
    distance: float


def _clamp(value: float) -> float:
    return min(max(value, 0.0), 1.0)


def _distance(a: Segment, b: Segment, s: float, t: float) -> float:
    return float(np.linalg.norm(a.point_at(s) - b.point_at(t)))


def point_segment_distance(point: np.ndarray, segment: Segment) -> tuple[float, float]:
    """Return (t, distance) of the point on `segment` closest to `point`"""
    v = segment.direction
    vv = float(v @ v)
    if vv <= ZERO_LENGTH_SQ:
        return 0.0, float(np.linalg.norm(point - segment.start))
    t = _clamp(float((point - segment.start) @ v) / vv)
    return t, float(np.linalg.norm(point - segment.point_at(t)))


def segment_min_distance(a: Segment, b: Segment) -> ProximityResult:
    """
    Exact minimum distance between two closed segments.

    The unconstrained stationary point s_c = (be - cd) / (ac - b^2),
    t_c = (ae - bd) / (ac - b^2) is clamped one parameter at a time: whenever
    t leaves [0, 1] it is pinned to the boundary and s is re-solved for that
    boundary and clamped again, so the constrained minimum is never missed.
    """
    u = a.direction
    v = b.direction
    w = a.start - b.start
    uu = float(u @ u)
    vv = float(v @ v)
    vw = float(v @ w)

    if uu <= ZERO_LENGTH_SQ and vv <= ZERO_LENGTH_SQ:
        return ProximityResult(0.0, 0.0, float(np.linalg.norm(w)))
    if uu <= ZERO_LENGTH_SQ:
        t, distance = point_segment_distance(a.start, b)
        return ProximityResult(0.0, t, distance)
    uw = float(u @ w)
    if vv <= ZERO_LENGTH_SQ:
        s, distance = point_segment_distance(b.start, a)
        return ProximityResult(s, 0.0, distance)

    uv = float(u @ v)
    denom = uu * vv - uv * uv
    parallel = denom < PARALLEL_TOL * uu * vv
    s = 0.0 if parallel else _clamp((uv * vw - uw * vv) / denom)
    t = (uv * s + vw) / vv
    if t < 0.0:
        t = 0.0
        s = _clamp(-uw / uu)
    elif t > 1.0:
        t = 1.0
        s = _clamp((uv - uw) / uu)
    best = ProximityResult(s, t, _distance(a, b, s, t))

    if parallel:
        # endpoint projections cover the overlap interval of parallel segments
        for s_end in (0.0, 1.0):
            t_end, d = point_segment_distance(a.point_at(s_end), b)
            if d < best.distance:
                best = ProximityResult(s_end, t_end, d)
        for t_end in (0.0, 1.0):
            s_end, d = point_segment_distance(b.point_at(t_end), a)
            if d < best.distance:
                best = ProximityResult(s_end, t_end, d)
    return best


def joined_min_distance(a: Segment, b: Segment) -> ProximityResult:
    """
    Separation of two segments that share their start point.

    The shared point itself is ignored: the result is the distance from the far
    end of one segment to the other segment, whichever is smaller. It is zero
    exactly when the two segments overlap along a common ray.
    """
    t, d_a = point_segment_distance(a.end, b)
    s, d_b = point_segment_distance(b.end, a)
    if d_a <= d_b:
        return ProximityResult(1.0, t, d_a)
    return ProximityResult(s, 1.0, d_b)


def _point_segment_batch(points, starts, ends) -> np.ndarray:
    v = ends - starts
    vv = np.einsum('ij,ij->i', v, v)
    safe = np.where(vv > ZERO_LENGTH_SQ, vv, 1.0)
    t = np.clip(np.einsum('ij,ij->i', points - starts, v) / safe, 0.0, 1.0)
    t = np.where(vv > ZERO_LENGTH_SQ, t, 0.0)
    return np.linalg.norm(points - (starts + t[:, None] * v), axis=1)


def segment_min_distance_batch(a_start, a_end, b_start, b_end) -> np.ndarray:
    """Vectorized `segment_min_distance` distances for arrays of shape (n, 3)"""
    a_start = np.asarray(a_start, dtype=float)
    a_end = np.asarray(a_end, dtype=float)
    b_start = np.asarray(b_start, dtype=float)
    b_end = np.asarray(b_end, dtype=float)
    u = a_end - a_start
    v = b_end - b_start
    w = a_start - b_start
    uu = np.einsum('ij,ij->i', u, u)
    vv = np.einsum('ij,ij->i', v, v)
    uv = np.einsum('ij,ij->i', u, v)
    uw = np.einsum('ij,ij->i', u, w)
    vw = np.einsum('ij,ij->i', v, w)

    uu_safe = np.where(uu > ZERO_LENGTH_SQ, uu, 1.0)
    vv_safe = np.where(vv > ZERO_LENGTH_SQ, vv, 1.0)
    denom = uu * vv - uv * uv
    general = denom >= PARALLEL_TOL * uu * vv
    denom_safe = np.where(general & (denom > 0.0), denom, 1.0)

    s = np.where(general, np.clip((uv * vw - uw * vv) / denom_safe, 0.0, 1.0), 0.0)
    t = (uv * s + vw) / vv_safe
    low = t < 0.0
    high = t > 1.0
    s = np.where(low, np.clip(-uw / uu_safe, 0.0, 1.0), s)
    s = np.where(high, np.clip((uv - uw) / uu_safe, 0.0, 1.0), s)
    t = np.clip(t, 0.0, 1.0)
    s = np.where(uu > ZERO_LENGTH_SQ, s, 0.0)
    t = np.where(vv > ZERO_LENGTH_SQ, t, 0.0)
    # a zero-length second segment pins t at 0: re-solve s against its point
    s = np.where((vv <= ZERO_LENGTH_SQ) & (uu > ZERO_LENGTH_SQ), np.clip(-uw / uu_safe, 0.0, 1.0), s)
    gap = (a_start + s[:, None] * u) - (b_start + t[:, None] * v)
    distance = np.linalg.norm(gap, axis=1)

    candidates = np.stack([
        distance,
        _point_segment_batch(a_start, b_start, b_end),
        _point_segment_batch(a_end, b_start, b_end),
        _point_segment_batch(b_start, a_start, a_end),
        _point_segment_batch(b_end, a_start, a_end),
    ])
    return candidates.min(axis=0)


def joined_min_distance_batch(a_start, a_end, b_start, b_end) -> np.ndarray:
    """Vectorized `joined_min_distance` distances; a_start and b_start coincide"""
    a_start = np.asarray(a_start, dtype=float)
    a_end = np.asarray(a_end, dtype=float)
    b_start = np.asarray(b_start, dtype=float)
    b_end = np.asarray(b_end, dtype=float)
    return np.minimum(
        _point_segment_batch(a_end, b_start, b_end),
        _point_segment_batch(b_end, a_start, a_end),
    )
