import csv
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np

from ...exceptions import RunFailure
from .models import TRACE_COLUMNS

logger = logging.getLogger(__name__)

SUMMARY_FILE = 'summary.json'


def _cell(value):
    if isinstance(value, float):
        return repr(value)
    return value


def write_trace(trace, directory):
    """Write one run's rows as ``<optimizer>_seed<seed>.csv``; returns the path."""
    directory = Path(directory)
    path = directory / f'{trace.label}.csv'
    try:
        directory.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', newline='') as handle:
            writer = csv.writer(handle)
            writer.writerow(TRACE_COLUMNS)
            for row in trace.rows:
                writer.writerow([_cell(value) for value in row.as_list()])
    except OSError as exc:
        raise RunFailure(f'cannot write trace {path}: {exc}', label=trace.label) from exc
    logger.debug(f'Wrote {len(trace.rows)} rows to {path}')
    return path


def write_summary(config, traces, directory, objective_floor=None):
    """One ``summary.json`` per experiment: config echo plus one record per run."""
    directory = Path(directory)
    path = directory / SUMMARY_FILE
    payload = {
        'experiment': config.name,
        'problem': config.problem.kind,
        'objective_floor': objective_floor,
        'threshold': config.threshold,
        'budget': config.budget,
        'config': config.to_dict(),
        'runs': [trace.summary() for trace in traces],
    }
    try:
        directory.mkdir(parents=True, exist_ok=True)
        with open(path, 'w') as handle:
            json.dump(payload, handle, indent=2)
    except OSError as exc:
        raise RunFailure(f'cannot write summary {path}: {exc}', label=config.name) from exc
    return path


def load_summaries(directory):
    """Every summary.json below ``directory``, in path order."""
    summaries = []
    for path in sorted(Path(directory).rglob(SUMMARY_FILE)):
        try:
            with open(path) as handle:
                summary = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            logger.warning(f'Skipping unreadable summary {path}: {exc}')
            continue
        summary['path'] = str(path)
        summaries.append(summary)
    return summaries


@dataclass
class ComparisonRow:
    experiment: str
    optimizer: str
    kind: str
    runs: int
    failures: int
    median_final_objective: Optional[float]
    median_gap: Optional[float]
    best_objective: Optional[float]
    median_steps_to_threshold: Optional[float]


def _median(values):
    values = [value for value in values if value is not None]
    return float(np.median(values)) if values else None


def compare_summaries(summaries):
    """
    Per (experiment, optimizer) medians, plus soft-regression flags.

    An experiment is flagged when an OGR optimizer's median final gap
    exceeds the best median gap among its ADAM optimizers.
    """
    rows: List[ComparisonRow] = []
    flags: List[str] = []
    for summary in summaries:
        experiment_rows = []
        names = list(dict.fromkeys(run['optimizer'] for run in summary['runs']))
        for name in names:
            runs = [run for run in summary['runs'] if run['optimizer'] == name]
            finished = [run for run in runs if run['error'] is None]
            steps = [
                math.inf if run['steps_to_threshold'] is None else run['steps_to_threshold']
                for run in finished
            ]
            median_steps = _median(steps)
            experiment_rows.append(ComparisonRow(
                experiment=summary['experiment'],
                optimizer=name,
                kind=runs[0]['kind'],
                runs=len(runs),
                failures=len(runs) - len(finished),
                median_final_objective=_median([run['final_objective'] for run in finished]),
                median_gap=_median([run['final_gap'] for run in finished]),
                best_objective=min(
                    (run['best_objective'] for run in finished if run['best_objective'] is not None),
                    default=None,
                ),
                median_steps_to_threshold=None if median_steps == math.inf else median_steps,
            ))
        rows.extend(experiment_rows)

        adam_gaps = [row.median_gap for row in experiment_rows if row.kind == 'adam' and row.median_gap is not None]
        if not adam_gaps:
            continue
        best_adam = min(adam_gaps)
        for row in experiment_rows:
            if row.kind != 'ogr':
                continue
            if row.median_gap is None or row.median_gap > best_adam:
                flags.append(
                    f'REGRESSION {row.experiment}: {row.optimizer} median gap {row.median_gap} '
                    f'> best ADAM median gap {best_adam}'
                )
    return rows, flags
