"""
Experiment runner: optimizes a wire arrangement and writes the result bundle.
"""
from __future__ import annotations

import csv
import dataclasses
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

from mechanism.exceptions import ConfigurationError
from mechanism.kinematics import decode_genome
from moo.nsga2 import ParetoArchive, Sample, evolve
from objectives.evaluation import evaluate

from .config import ExperimentConfig
from .designs import design_to_dict, write_json
from .rendering import render_design, render_pareto_scatter

logger = logging.getLogger(__name__)


class OutputError(OSError):
    """The output directory cannot be created or written"""


@dataclass
class ResultBundle:
    out_dir: Path
    samples: list[Sample]
    archive: ParetoArchive
    design_1: Sample
    design_2: Sample
    files: list[Path] = field(default_factory=list)


class DesignProblem:
    """Genome -> Evaluation callback for the optimizer"""

    def __init__(self, experiment: ExperimentConfig):
        self.experiment = experiment

    def decode(self, genome):
        return decode_genome(genome, self.experiment.mechanism)

    def __call__(self, genome):
        experiment = self.experiment
        return evaluate(
            experiment.mechanism,
            self.decode(genome),
            experiment.trajectory,
            experiment.bounds,
            experiment.epsilon,
            experiment.r_min,
            experiment.sphere_center,
        )


def select_designs(archive: ParetoArchive, policy: str = 'global') -> tuple[Sample, Sample]:
    """
    Design-1: fewest crossings, ties broken by larger ln E_torque.
    Design-2: largest ln E_torque overall ('global'), or among entries that
    cross at least once ('crossing', falling back to 'global').
    """
    if not len(archive):
        raise ConfigurationError('Cannot select designs from an empty archive')
    entries = archive.entries
    design_1 = min(entries, key=lambda s: (s.result.e_cross, -s.result.log_e_torque))
    candidates = entries
    if policy == 'crossing':
        crossing = [s for s in entries if s.result.e_cross > 0]
        candidates = crossing or entries
    elif policy != 'global':
        raise ConfigurationError(f"Unknown design_2 policy '{policy}'")
    design_2 = max(candidates, key=lambda s: s.result.log_e_torque)
    return design_1, design_2


def prepare_output_dir(out_dir) -> Path:
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"Cannot create output directory {out_dir}: {exc}") from exc
    if not os.access(out_dir, os.W_OK):
        raise OutputError(f"Output directory {out_dir} is not writable")
    return out_dir


def write_samples(path: Path, samples: list[Sample], genome_length: int) -> Path:
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(['trial', 'e_cross', 'log_e_torque'] + [f"g{i}" for i in range(genome_length)])
        for sample in samples:
            writer.writerow(
                [sample.trial, sample.result.e_cross, repr(sample.result.log_e_torque)]
                + [repr(float(v)) for v in sample.genome]
            )
    return path


def _entry_dict(experiment: ExperimentConfig, sample: Sample, problem: DesignProblem) -> dict:
    return design_to_dict(
        experiment.mechanism, problem.decode(sample.genome), sample.genome, sample.result,
        trial=sample.trial, generation=sample.generation,
    )


def run_experiment(experiment: ExperimentConfig, out_dir, seed: int | None = None) -> ResultBundle:
    """Optimize, then write samples.csv, pareto.json, the two design files and their SVGs"""
    out_dir = prepare_output_dir(out_dir)
    if seed is not None:
        experiment = dataclasses.replace(experiment, ga=dataclasses.replace(experiment.ga, rng_seed=seed))
    problem = DesignProblem(experiment)
    cfg = experiment.mechanism
    logger.info(f"Running '{experiment.name}': M={cfg.wire_count}, N={cfg.points_per_wire}, D={cfg.dof_count}, {experiment.ga.evaluations} evaluations")

    archive, samples = evolve(problem, cfg.genome_length, experiment.ga)
    design_1, design_2 = select_designs(archive, experiment.design_2_policy)

    try:
        files = [write_samples(out_dir / 'samples.csv', samples, cfg.genome_length)]
        files.append(write_json(out_dir / 'pareto.json', {
            'experiment': experiment.name,
            'seed': experiment.ga.rng_seed,
            'entries': [_entry_dict(experiment, entry, problem) for entry in archive],
        }))
        scatter = out_dir / 'pareto_scatter.svg'
        scatter.write_text(render_pareto_scatter(samples, archive, {'Design-1': design_1, 'Design-2': design_2}))
        files.append(scatter)
        for label, sample in (('design_1', design_1), ('design_2', design_2)):
            files.append(write_json(out_dir / f"{label}.json", _entry_dict(experiment, sample, problem)))
            for name, svg in render_design(experiment, problem.decode(sample.genome), sample.result).items():
                path = out_dir / f"{label}_{name}"
                path.write_text(svg)
                files.append(path)
    except OSError as exc:
        raise OutputError(f"Cannot write results to {out_dir}: {exc}") from exc

    logger.info(f"Wrote {len(files)} files to {out_dir}; archive holds {len(archive)} designs")
    return ResultBundle(out_dir, samples, archive, design_1, design_2, files)
