"""Design JSON files: raw genome plus the decoded disc coordinates"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from mechanism.exceptions import ConfigurationError
from mechanism.kinematics import decode_genome, encode_design
from mechanism.types import DesignParams, MechanismConfig
from objectives.types import Evaluation


def design_to_dict(cfg: MechanismConfig, design: DesignParams, genome=None, evaluation: Evaluation | None = None, **extra) -> dict:
    genome = encode_design(design, cfg) if genome is None else np.asarray(genome, dtype=float)
    data = {
        'disc_radius': cfg.disc_radius,
        'wire_count': design.wire_count,
        'points_per_wire': design.points_per_wire,
        'genome': [float(v) for v in genome],
        'points': design.points.tolist(),
    }
    if evaluation is not None:
        data['evaluation'] = evaluation.as_dict()
    data.update(extra)
    return data


def design_from_dict(data, cfg: MechanismConfig) -> DesignParams:
    """`points` when present, otherwise the decoded `genome`; checked against cfg"""
    if not isinstance(data, dict):
        raise ConfigurationError('A design must be a JSON object with "points" or "genome"')
    if data.get('points') is not None:
        try:
            design = DesignParams(data['points'])
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"Invalid design points: {exc}") from exc
    elif data.get('genome') is not None:
        design = decode_genome(data['genome'], cfg)
    else:
        raise ConfigurationError('A design needs "points" or "genome"')
    design.check(cfg)
    return design


def load_design(path, cfg: MechanismConfig) -> DesignParams:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"Cannot read design {path}: {exc}") from exc
    return design_from_dict(data, cfg)


def write_json(path, data) -> Path:
    path = Path(path)
    path.write_text(json.dumps(data, indent=2) + '\n')
    return path
