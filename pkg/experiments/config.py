"""
Experiment configuration: YAML key trees validated by DRF serializers and
turned into the domain types. Angles are degrees in files and radians from
here on.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml
from django.conf import settings

from mechanism.exceptions import ConfigurationError
from mechanism.types import MechanismConfig
from moo.nsga2 import GAConfig
from objectives.types import Trajectory
from torque_space.polytope import TensionBounds

from .serializers import ExperimentConfigSerializer

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    mechanism: MechanismConfig
    bounds: TensionBounds
    trajectory: Trajectory
    epsilon: float
    r_min: float
    sphere_center: np.ndarray | None
    ga: GAConfig
    design_2_policy: str = 'global'
    output: str | None = None
    source: str = '<config>'


def preset_names() -> list[str]:
    return sorted(path.stem for path in Path(settings.TENDON_DESIGN['PRESETS_DIR']).glob('*.yaml'))


def resolve_config_path(name_or_path) -> Path:
    """A config file path, or the name of a shipped preset"""
    path = Path(name_or_path)
    if path.is_file():
        return path
    preset = Path(settings.TENDON_DESIGN['PRESETS_DIR']) / f"{name_or_path}.yaml"
    if preset.is_file():
        return preset
    raise ConfigurationError(f"No config file or preset named '{name_or_path}' (presets: {', '.join(preset_names())})")


def _key_lines(node, prefix=()) -> dict[tuple, int]:
    """1-based line of every key path in a composed YAML tree"""
    lines = {}
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            path = prefix + (str(key_node.value),)
            lines[path] = key_node.start_mark.line + 1
            lines.update(_key_lines(value_node, path))
    elif isinstance(node, yaml.SequenceNode):
        for index, item in enumerate(node.value):
            path = prefix + (str(index),)
            lines[path] = item.start_mark.line + 1
            lines.update(_key_lines(item, path))
    return lines


def _flatten_errors(errors, prefix=()):
    if isinstance(errors, dict):
        for key, value in errors.items():
            path = prefix if key == 'non_field_errors' else prefix + (str(key),)
            yield from _flatten_errors(value, path)
    elif isinstance(errors, list) and errors and all(isinstance(item, str) for item in errors):
        for message in errors:
            yield prefix, str(message)
    elif isinstance(errors, list):
        for index, value in enumerate(errors):
            if value:
                yield from _flatten_errors(value, prefix + (str(index),))
    else:
        yield prefix, str(errors)


def _line_for(path: tuple, lines: dict[tuple, int]) -> int:
    while path and path not in lines:
        path = path[:-1]
    return lines.get(path, 1)


def format_errors(errors, text: str | None = None, source: str = '<config>') -> str:
    """One 'source:line: key.path: message' line per serializer error"""
    lines = {}
    if text is not None:
        try:
            lines = _key_lines(yaml.compose(text, Loader=yaml.SafeLoader))
        except yaml.YAMLError:
            lines = {}
    messages = []
    for path, message in _flatten_errors(errors):
        location = '.'.join(path) or '<root>'
        messages.append(f"{source}:{_line_for(path, lines)}: {location}: {message}")
    return '\n'.join(messages)


def build_experiment(data: dict, source: str = '<config>') -> ExperimentConfig:
    """Domain objects from serializer-validated data; the only degree-to-radian conversion"""
    mechanism = data['mechanism']
    ga = data['ga']
    thresholds = data['thresholds']
    center = thresholds.get('sphere_center')
    return ExperimentConfig(
        name=data.get('name') or Path(source).stem,
        mechanism=MechanismConfig(
            disc_radius=mechanism['disc_radius'],
            link_length=mechanism['link_length'],
            joint_axes=tuple(mechanism['joint_axes']),
            wire_count=mechanism['wire_count'],
            points_per_wire=mechanism['points_per_wire'],
            link_clearance=mechanism['link_clearance'],
        ),
        bounds=TensionBounds(data['tension']['f_min'], data['tension']['f_max']),
        trajectory=Trajectory.from_degrees(data['trajectory']['waypoints'], data['trajectory']['close_loop']),
        epsilon=thresholds['epsilon'],
        r_min=thresholds['r_min'],
        sphere_center=None if center is None else np.asarray(center, dtype=float),
        ga=GAConfig(
            population_size=ga['population'],
            generations=ga['generations'],
            crossover_prob=ga['crossover_prob'],
            crossover_eta=ga['crossover_eta'],
            mutation_prob=ga['mutation_prob'],
            mutation_eta=ga['mutation_eta'],
            rng_seed=ga['seed'],
            workers=ga['workers'],
        ),
        design_2_policy=data['selection']['design_2'],
        output=data.get('output'),
        source=source,
    )


def config_from_tree(tree, text: str | None = None, source: str = '<config>') -> ExperimentConfig:
    if not isinstance(tree, dict):
        raise ConfigurationError(f"{source}:1: the config must be a mapping of sections")
    serializer = ExperimentConfigSerializer(data=tree)
    if not serializer.is_valid():
        raise ConfigurationError(format_errors(serializer.errors, text, source))
    return build_experiment(serializer.validated_data, source)


def parse_config(text: str, source: str = '<config>') -> ExperimentConfig:
    try:
        tree = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, 'problem_mark', None)
        line = mark.line + 1 if mark is not None else 1
        raise ConfigurationError(f"{source}:{line}: invalid YAML: {getattr(exc, 'problem', exc)}") from exc
    return config_from_tree(tree, text, source)


def load_config(name_or_path) -> ExperimentConfig:
    path = resolve_config_path(name_or_path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"Cannot read config {path}: {exc}") from exc
    experiment = parse_config(text, str(path))
    logger.info(f"Loaded experiment '{experiment.name}' from {path}")
    return experiment
