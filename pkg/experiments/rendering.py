"""
SVG renderings of designs and of the sampling history.

Geometry is projected and mapped to pixels here; the templates under
templates/experiments/ only draw what they are given.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from django.template.loader import render_to_string
from scipy.spatial import ConvexHull, QhullError

from mechanism.kinematics import anchor_world_positions, joint_rotation, link_segments, muscle_jacobian
from mechanism.types import DesignParams
from objectives.types import Evaluation
from torque_space.polytope import project_to_torque, tension_vertices, torque_score

logger = logging.getLogger(__name__)

PANEL_SIZE = 300
PADDING = 24
WIRE_COLORS = ('#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#17becf', '#8c564b', '#e377c2', '#bcbd22', '#7f7f7f', '#393b79', '#637939')
RIM_POINTS = 48


@dataclass(frozen=True)
class Panel:
    """Maps a square world window onto a square block of pixels, y up"""
    left: float
    top: float
    x_range: tuple[float, float]
    y_range: tuple[float, float]
    size: float = PANEL_SIZE

    @property
    def scale(self) -> float:
        span = max(self.x_range[1] - self.x_range[0], self.y_range[1] - self.y_range[0])
        return (self.size - 2 * PADDING) / span

    def point(self, x: float, y: float) -> tuple[float, float]:
        px = self.left + PADDING + (x - self.x_range[0]) * self.scale
        py = self.top + self.size - PADDING - (y - self.y_range[0]) * self.scale
        return round(px, 2), round(py, 2)

    def polyline(self, points) -> str:
        return ' '.join(f"{x:.2f},{y:.2f}" for x, y in (self.point(*p) for p in points))

    def line(self, a, b) -> dict:
        (x1, y1), (x2, y2) = self.point(*a), self.point(*b)
        return {'x1': x1, 'y1': y1, 'x2': x2, 'y2': y2}


def _moving_rim(cfg, q) -> np.ndarray:
    angles = np.linspace(0.0, 2 * np.pi, RIM_POINTS, endpoint=False)
    local = np.stack([cfg.disc_radius * np.cos(angles), cfg.disc_radius * np.sin(angles), np.full(RIM_POINTS, cfg.link_length)], axis=1)
    return cfg.joint_center + local @ joint_rotation(cfg, q).T


def _mechanism_panel(panel: Panel, cfg, design: DesignParams, q, axes: tuple[int, int], title: str) -> dict:
    """Orthographic projection of wires, links and discs onto two world axes"""
    i, j = axes
    wires = []
    for path in anchor_world_positions(cfg, design, q):
        wires.append({
            'points': panel.polyline([(a[i], a[j]) for a in path.anchors]),
            'color': WIRE_COLORS[path.wire_index % len(WIRE_COLORS)],
            'label': f"w{path.wire_index}",
        })
    links = [panel.line((s.start[i], s.start[j]), (s.end[i], s.end[j])) for s in link_segments(cfg, q)]
    angles = np.linspace(0.0, 2 * np.pi, RIM_POINTS, endpoint=False)
    base_rim = np.stack([cfg.disc_radius * np.cos(angles), cfg.disc_radius * np.sin(angles), np.zeros(RIM_POINTS)], axis=1)
    discs = [panel.polyline(rim[:, [i, j]]) for rim in (base_rim, _moving_rim(cfg, q))]
    return {'left': panel.left, 'top': panel.top, 'size': panel.size, 'title': title, 'wires': wires, 'links': links, 'discs': discs}


def _torque_plane_axes(cfg) -> tuple[int, int]:
    """Roll and yaw columns when present; a 3-axis joint drops pitch"""
    if cfg.dof_count == 2:
        return 0, 1
    return cfg.joint_axes.index('roll'), cfg.joint_axes.index('yaw')


def torque_panel(left: float, top: float, points, radius: float | None, center=None, labels=('tau_1', 'tau_2')) -> dict:
    """
    Outline of 2-D torque points with the inscribed circle of `radius`
    around `center` (the origin by default). `radius` None draws no circle.
    """
    points = np.asarray(points, dtype=float)
    center = np.zeros(2) if center is None else np.asarray(center, dtype=float)
    reach = max(float(np.abs(points).max()), radius or 0.0, 1e-12) * 1.1
    panel = Panel(left, top, (-reach, reach), (-reach, reach))
    try:
        outline = points[ConvexHull(points).vertices]
    except QhullError:
        outline = points[np.lexsort((points[:, 1], points[:, 0]))]
    context = {
        'left': left, 'top': top, 'size': panel.size,
        'outline': panel.polyline(outline),
        'axes': [panel.line((-reach, 0.0), (reach, 0.0)), panel.line((0.0, -reach), (0.0, reach))],
        'labels': labels,
        'circle': None,
    }
    if radius is not None:
        cx, cy = panel.point(*center)
        context['circle'] = {'cx': cx, 'cy': cy, 'r': round(radius * panel.scale, 2)}
    return context


def render_waypoint(experiment, design: DesignParams, index: int, evaluation: Evaluation | None = None) -> str:
    """Side view, top view and torque polygon of one waypoint as an SVG document"""
    cfg = experiment.mechanism
    traj = experiment.trajectory
    q = traj.waypoints[index]
    extent = 1.1 * (cfg.link_length + np.hypot(cfg.disc_radius, cfg.link_length))
    side = Panel(0, 40, (-extent, extent), (cfg.link_length - extent, cfg.link_length + extent))
    top = Panel(PANEL_SIZE, 40, (-extent, extent), (-extent, extent))

    jacobian = muscle_jacobian(cfg, design, q)
    score, _ = torque_score(jacobian, experiment.bounds, experiment.r_min, experiment.sphere_center)
    plane = _torque_plane_axes(cfg)
    torques = project_to_torque(jacobian, tension_vertices(cfg.wire_count, experiment.bounds))[:, list(plane)]
    center = None if experiment.sphere_center is None else experiment.sphere_center[list(plane)]
    torque = torque_panel(
        2 * PANEL_SIZE, 40, torques, score.radius if score.origin_interior else None, center,
        labels=(cfg.joint_axes[plane[0]], cfg.joint_axes[plane[1]]),
    )

    angles = ', '.join(f"{axis} {np.degrees(value):.1f}" for axis, value in zip(cfg.joint_axes, q))
    height = PANEL_SIZE + 80
    steps = []
    if evaluation is not None:
        for step, (i, j) in enumerate(traj.steps):
            if index in (i, j):
                steps.append({
                    'y': height - 26 + 14 * len(steps),
                    'text': f"E({i + 1}->{j + 1}) = {evaluation.per_segment_crossings[step]}",
                })
    context = {
        'width': 3 * PANEL_SIZE,
        'height': height,
        'title': f"Waypoint {index + 1}: {angles} deg",
        'views': [
            _mechanism_panel(side, cfg, design, q, (0, 2), 'side (x-z)'),
            _mechanism_panel(top, cfg, design, q, (0, 1), 'top (x-y)'),
        ],
        'torque': torque,
        'radius_label': f"R_B = {score.radius:.4g}" + ('' if score.origin_interior else ' (R_min)'),
        'steps': steps,
    }
    return render_to_string('experiments/design.svg', context)


def render_design(experiment, design: DesignParams, evaluation: Evaluation | None = None, waypoints=None) -> dict[str, str]:
    """SVG text per waypoint, keyed by a file name; `waypoints` None renders all"""
    indices = range(len(experiment.trajectory)) if waypoints is None else waypoints
    return {f"waypoint_{i + 1}.svg": render_waypoint(experiment, design, i, evaluation) for i in indices}


def render_pareto_scatter(samples, archive, highlights: dict | None = None) -> str:
    """
    Every sample at (ln E_torque, E_cross), shaded from light (early trials)
    to dark (late trials); archive members outlined and `highlights`
    ({label: sample}) annotated.
    """
    width, height, margin = 640, 480, 60
    xs = np.array([sample.result.log_e_torque for sample in samples])
    ys = np.array([sample.result.e_cross for sample in samples], dtype=float)
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = 0.0, max(float(ys.max()), 1.0)
    x_span = x_hi - x_lo or 1.0

    def to_px(x, y):
        px = margin + (x - x_lo) / x_span * (width - 2 * margin)
        py = height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2 * margin)
        return round(px, 2), round(py, 2)

    last = max(len(samples) - 1, 1)
    dots = []
    for sample, x, y in zip(samples, xs, ys):
        cx, cy = to_px(x, y)
        level = int(round(220 - 200 * sample.trial / last))
        dots.append({'cx': cx, 'cy': cy, 'fill': f"rgb({level},{level},{level})"})
    front = [dict(zip(('cx', 'cy'), to_px(e.result.log_e_torque, e.result.e_cross))) for e in archive]
    labels = []
    for label, sample in (highlights or {}).items():
        cx, cy = to_px(sample.result.log_e_torque, sample.result.e_cross)
        labels.append({'cx': cx, 'cy': cy, 'text': label})
    context = {
        'width': width, 'height': height, 'margin': margin,
        'plot_right': width - margin, 'plot_bottom': height - margin,
        'dots': dots, 'front': front, 'labels': labels,
        'x_ticks': [{'x': to_px(v, y_lo)[0], 'text': f"{v:.2f}"} for v in (x_lo, x_hi)],
        'y_ticks': [{'y': to_px(x_lo, v)[1], 'text': f"{v:.0f}"} for v in (y_lo, y_hi)],
    }
    return render_to_string('experiments/pareto_scatter.svg', context)
