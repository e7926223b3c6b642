"""
Wire crossing checks between two waypoints.

Every wire segment runs from a base-disc anchor to a moving-disc anchor (or
back), so sharing between segments is decided per disc: two anchors on the
same disc either coincide at every posture or at none.
"""
from __future__ import annotations

import itertools
import logging

import numpy as np
from django.conf import settings

from geometry.motion import MotionPair, crossing_during_motion
from mechanism.kinematics import anchor_world_positions, link_segments
from mechanism.types import ANCHOR_DISCS, DesignParams, MechanismConfig, WirePath

from .types import CheckPair

logger = logging.getLogger(__name__)

LINK_NAMES = ('base', 'moving')
# anchors closer than this are the same point
SHARED_TOL = 1e-12


def detector_options() -> dict:
    """Line-search settings for crossing_during_motion from settings.TENDON_DESIGN"""
    config = settings.TENDON_DESIGN
    return {
        'max_iter': config['BRENT_MAX_ITER'],
        'xatol': config['BRENT_XATOL'],
        'prescan': config['PRESCAN_POINTS'],
    }


def _disc_offset(cfg: MechanismConfig, anchor: np.ndarray, disc: str) -> float:
    """Distance of a world-frame anchor from the centre of the disc it sits on"""
    if disc == 'base':
        return float(np.linalg.norm(anchor[:2]))
    # moving anchors sit at sqrt(L^2 + r^2) from the joint centre
    spread = float(np.sum((anchor - cfg.joint_center) ** 2)) - cfg.link_length ** 2
    return float(np.sqrt(max(spread, 0.0)))


def _segment_anchors(path: WirePath, segment: int) -> dict[str, np.ndarray]:
    return {
        ANCHOR_DISCS[segment]: path.anchors[segment],
        ANCHOR_DISCS[segment + 1]: path.anchors[segment + 1],
    }


def _shares_anchor(first: dict[str, np.ndarray], second: dict[str, np.ndarray]) -> bool:
    return any(np.linalg.norm(first[disc] - second[disc]) <= SHARED_TOL for disc in first)


def collect_check_pairs(cfg: MechanismConfig, paths: list[WirePath]) -> list[CheckPair]:
    """
    Segment pairs to check at every trajectory step.

    Inter-wire pairs and wire-link pairs that share an anchor point are left
    out; the two segments of a fold wire are kept as a joined pair. A
    wire-link pair whose anchor lies closer than cfg.link_clearance to the
    link's disc centre is kept as forced.
    """
    refs = [(path.wire_index, j) for path in paths for j in range(len(path.segments))]
    anchors = {(path.wire_index, j): _segment_anchors(path, j) for path in paths for j in range(len(path.segments))}

    pairs = []
    for first, second in itertools.combinations(refs, 2):
        if first[0] != second[0] and not _shares_anchor(anchors[first], anchors[second]):
            pairs.append(CheckPair(first, second))
    for path in paths:
        if len(path.segments) == 2:
            pairs.append(CheckPair((path.wire_index, 0), (path.wire_index, 1), joined=True))
    for ref in refs:
        for link in LINK_NAMES:
            offset = _disc_offset(cfg, anchors[ref][link], link)
            if offset < cfg.link_clearance:
                pairs.append(CheckPair(ref, link, forced=True))
            elif offset > SHARED_TOL:
                pairs.append(CheckPair(ref, link))
    return pairs


def pair_segments(pair: CheckPair, paths: list[WirePath], links):
    """The two Segments of `pair` at one posture; joined pairs start at their shared anchor"""
    wire, segment = pair.first
    first = paths[wire].segments[segment]
    if isinstance(pair.second, str):
        return first, links[LINK_NAMES.index(pair.second)]
    wire, segment = pair.second
    second = paths[wire].segments[segment]
    if pair.joined:
        return first.reversed(), second
    return first, second


def motion_pairs(cfg: MechanismConfig, design: DesignParams, q_a, q_b) -> list[tuple[CheckPair, MotionPair]]:
    """Every check pair with its segments at q_a (k=0) and q_b (k=1)"""
    paths_a = anchor_world_positions(cfg, design, q_a)
    paths_b = anchor_world_positions(cfg, design, q_b)
    links_a = link_segments(cfg, q_a)
    links_b = link_segments(cfg, q_b)
    # sharing does not depend on posture; at rest the moving-disc offsets are exact
    rest = anchor_world_positions(cfg, design, np.zeros(cfg.dof_count))
    result = []
    for pair in collect_check_pairs(cfg, rest):
        a_begin, b_begin = pair_segments(pair, paths_a, links_a)
        a_end, b_end = pair_segments(pair, paths_b, links_b)
        result.append((pair, MotionPair(a_begin, a_end, b_begin, b_end, pair.joined)))
    return result


def count_crossings_segment(cfg: MechanismConfig, design: DesignParams, q_a, q_b, epsilon: float, **options) -> int:
    """Number of check pairs that come closer than `epsilon` while moving from q_a to q_b"""
    options = options or detector_options()
    crossings = 0
    for pair, motion in motion_pairs(cfg, design, q_a, q_b):
        if pair.forced:
            crossings += 1
            continue
        report = crossing_during_motion(motion, epsilon, **options)
        if report.crossed:
            logger.debug(f"Crossing {pair.label()} at k={report.k_min:.4f}, d={report.d_min:.3e}")
            crossings += 1
    return crossings
