"""
Crossing detection for two segments whose endpoints move linearly.

A MotionPair holds the two segments at trajectory parameter k=0 (the
configuration at the earlier waypoint) and k=1 (the later waypoint). In
between, every endpoint is blended as (1 - k) * begin + k * end.
"""
from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .proximity import ProximityResult, Segment, joined_min_distance, segment_min_distance

logger = logging.getLogger(__name__)

DEFAULT_MAX_ITER = 20
DEFAULT_XATOL = 1e-6
DEFAULT_PRESCAN = 9


@dataclass(frozen=True)
class MotionPair:
    """Two segments at k=0 and k=1. `joined` pairs share their start point"""
    seg_a_begin: Segment
    seg_a_end: Segment
    seg_b_begin: Segment
    seg_b_end: Segment
    joined: bool = False

    @classmethod
    def static(cls, a: Segment, b: Segment, joined: bool = False) -> 'MotionPair':
        return cls(a, a, b, b, joined)

    def reversed(self) -> 'MotionPair':
        """The same motion traversed from k=1 back to k=0"""
        return MotionPair(self.seg_a_end, self.seg_a_begin, self.seg_b_end, self.seg_b_begin, self.joined)


@dataclass(frozen=True)
class CrossingReport:
    crossed: bool
    k_min: float
    d_min: float


def _blend(begin: Segment, end: Segment, k: float) -> Segment:
    return Segment(
        (1.0 - k) * begin.start + k * end.start,
        (1.0 - k) * begin.end + k * end.end,
    )


def distance_at(pair: MotionPair, k: float) -> ProximityResult:
    """Proximity of the two interpolated segments at trajectory parameter k"""
    if not 0.0 <= k <= 1.0:
        raise ValueError(f"Interpolation parameter k must lie in [0, 1], got {k}")
    a = _blend(pair.seg_a_begin, pair.seg_a_end, k)
    b = _blend(pair.seg_b_begin, pair.seg_b_end, k)
    if pair.joined:
        return joined_min_distance(a, b)
    return segment_min_distance(a, b)


class _BelowThreshold(Exception):
    """Raised inside the line search to stop at the first sub-threshold sample"""


def _speed_bound(pair: MotionPair) -> float:
    """Upper bound on |d(k1) - d(k2)| / |k1 - k2| for the blended segments"""
    moves_a = max(
        np.linalg.norm(pair.seg_a_end.start - pair.seg_a_begin.start),
        np.linalg.norm(pair.seg_a_end.end - pair.seg_a_begin.end),
    )
    moves_b = max(
        np.linalg.norm(pair.seg_b_end.start - pair.seg_b_begin.start),
        np.linalg.norm(pair.seg_b_end.end - pair.seg_b_begin.end),
    )
    return float(moves_a + moves_b)


def _refine_by_bound(sample, seen: dict[float, float], speed: float, epsilon: float) -> None:
    """
    Bisect every interval between samples whose Lipschitz lower bound still
    allows a distance below epsilon, lowest bound first.

    Intervals narrower than epsilon / (2 * speed) are left alone: a dip below
    epsilon / 2 inside them already puts a sample below epsilon.
    """
    if speed <= 0.0:
        return
    min_width = epsilon / (2.0 * speed)
    heap = []

    def push(k1, d1, k2, d2):
        width = k2 - k1
        bound = 0.5 * (d1 + d2 - speed * width)
        if bound < epsilon and width > min_width:
            heapq.heappush(heap, (bound, k1, d1, k2, d2))

    points = sorted(seen.items())
    for (k1, d1), (k2, d2) in zip(points, points[1:]):
        push(k1, d1, k2, d2)
    while heap:
        _, k1, d1, k2, d2 = heapq.heappop(heap)
        mid = 0.5 * (k1 + k2)
        d_mid = sample(mid)
        push(k1, d1, mid, d_mid)
        push(mid, d_mid, k2, d2)


def crossing_during_motion(
    pair: MotionPair,
    epsilon: float,
    max_iter: int = DEFAULT_MAX_ITER,
    xatol: float = DEFAULT_XATOL,
    prescan: int = DEFAULT_PRESCAN,
) -> CrossingReport:
    """
    Decide whether the two moving segments come closer than `epsilon`.

    `prescan` equally spaced k values (both endpoints included) are sampled
    first. Each local minimum of the samples is then refined with a bounded
    Brent search over its neighbouring interval, best first, at most
    `max_iter` iterations each. Afterwards every interval between the samples
    taken so far, inside a Brent bracket or not, is bisected while its
    Lipschitz lower bound still allows a sub-epsilon value. The search stops
    as soon as any sample is below epsilon.
    """
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")

    best = {'k': 0.0, 'd': float('inf')}
    seen: dict[float, float] = {}

    def sample(k: float) -> float:
        k = float(k)
        d = distance_at(pair, k).distance
        seen[k] = d
        if d < best['d']:
            best['k'], best['d'] = k, d
        if d < epsilon:
            raise _BelowThreshold
        return d

    # ks[0] == 0 so the starting configuration is always checked first
    ks = np.linspace(0.0, 1.0, max(prescan, 3))
    last = len(ks) - 1
    try:
        values = [sample(k) for k in ks]

        for i in sorted(range(len(ks)), key=lambda idx: values[idx]):
            is_local_min = (i == 0 or values[i] <= values[i - 1]) and (i == last or values[i] <= values[i + 1])
            if is_local_min:
                minimize_scalar(
                    sample,
                    bounds=(ks[max(i - 1, 0)], ks[min(i + 1, last)]),
                    method='bounded',
                    options={'maxiter': max_iter, 'xatol': xatol},
                )

        _refine_by_bound(sample, seen, _speed_bound(pair), epsilon)
    except _BelowThreshold:
        return CrossingReport(True, best['k'], best['d'])

    logger.debug(f"No crossing after {len(seen)} samples, closest {best['d']:.3g} at k={best['k']:.4f}")
    return CrossingReport(False, best['k'], best['d'])
