"""
Brute-force crossing oracle: minimum distance of every check pair over a
uniform grid of the interpolation parameter k.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from geometry.motion import MotionPair, crossing_during_motion
from geometry.proximity import joined_min_distance_batch, segment_min_distance_batch
from mechanism.exceptions import ConfigurationError
from mechanism.types import DesignParams, MechanismConfig

from .crossings import detector_options, motion_pairs
from .types import CheckPair, Trajectory

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 10001


@dataclass(frozen=True)
class OracleRecord:
    step: int
    pair: CheckPair
    oracle_min: float
    oracle_k: float
    detector_crossed: bool

    def violates_guard_band(self, epsilon: float) -> bool:
        """Detector disagrees with a clear-cut oracle verdict (below eps/2 or above 2 eps)"""
        if self.pair.forced:
            return False
        if self.oracle_min < epsilon / 2 and not self.detector_crossed:
            return True
        return self.oracle_min > 2 * epsilon and self.detector_crossed

    def as_dict(self, epsilon: float) -> dict:
        return {
            'step': self.step,
            'pair': self.pair.label(),
            'kind': self.pair.kind,
            'forced': self.pair.forced,
            'oracle_min': self.oracle_min,
            'oracle_k': self.oracle_k,
            'detector_crossed': self.detector_crossed,
            'violation': self.violates_guard_band(epsilon),
        }


def _blend_grid(begin, end, ks):
    return (1.0 - ks)[:, None] * begin[None, :] + ks[:, None] * end[None, :]


def dense_min_distance(motion: MotionPair, samples: int = DEFAULT_SAMPLES) -> tuple[float, float]:
    """(minimum distance, k at the minimum) over `samples` equally spaced k values"""
    if samples < 2:
        raise ConfigurationError(f"The oracle needs at least 2 samples per step, got {samples}")
    ks = np.linspace(0.0, 1.0, samples)
    grids = (
        _blend_grid(motion.seg_a_begin.start, motion.seg_a_end.start, ks),
        _blend_grid(motion.seg_a_begin.end, motion.seg_a_end.end, ks),
        _blend_grid(motion.seg_b_begin.start, motion.seg_b_end.start, ks),
        _blend_grid(motion.seg_b_begin.end, motion.seg_b_end.end, ks),
    )
    kernel = joined_min_distance_batch if motion.joined else segment_min_distance_batch
    distances = kernel(*grids)
    best = int(np.argmin(distances))
    return float(distances[best]), float(ks[best])


def oracle_min_distances(cfg: MechanismConfig, design: DesignParams, q_a, q_b, samples: int = DEFAULT_SAMPLES):
    """Dense-grid minimum distance of every check pair between q_a and q_b"""
    return [(pair, *dense_min_distance(motion, samples)) for pair, motion in motion_pairs(cfg, design, q_a, q_b)]


def oracle_report(
    cfg: MechanismConfig,
    design: DesignParams,
    traj: Trajectory,
    epsilon: float,
    samples: int = DEFAULT_SAMPLES,
    **options,
) -> list[OracleRecord]:
    """Oracle minimum and detector verdict for every check pair on every trajectory step"""
    options = options or detector_options()
    records = []
    for step, (i, j) in enumerate(traj.steps):
        for pair, motion in motion_pairs(cfg, design, traj.waypoints[i], traj.waypoints[j]):
            oracle_min, oracle_k = dense_min_distance(motion, samples)
            crossed = pair.forced or crossing_during_motion(motion, epsilon, **options).crossed
            records.append(OracleRecord(step, pair, oracle_min, oracle_k, crossed))
    violations = sum(record.violates_guard_band(epsilon) for record in records)
    if violations:
        logger.warning(f"{violations} oracle guard-band violation(s) out of {len(records)} checks")
    return records
