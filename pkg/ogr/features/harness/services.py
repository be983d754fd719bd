import logging
import sys
import time
from pathlib import Path

import numpy as np
from django.conf import settings
from tqdm import tqdm

from ...exceptions import OGRError
from ..optimizer.baselines import BaselineOptimizer
from ..optimizer.services import OGROptimizer
from ..problems.services import GradientOracle, make_problem
from ..utils import or_zero
from .config import load_config
from .models import RunTrace, TraceRow
from .traces import write_summary, write_trace

logger = logging.getLogger(__name__)


def build_optimizer(spec, theta0, seed):
    if spec.kind == 'ogr':
        return OGROptimizer(spec.build_config(), theta0, seed, name=spec.name)
    return BaselineOptimizer(spec.build_config(), theta0, name=spec.name)


def noise_stream(config, optimizer_index, seed):
    """Common random numbers share one stream per seed across optimizers."""
    if config.common_random_numbers:
        return (seed,)
    return (seed, optimizer_index)


def _row(report):
    return TraceRow(
        step=report.step,
        objective=float(report.objective_after),
        grad_norm=report.grad_norm,
        residual_norm=report.residual_norm,
        lambda_min=or_zero(report.lambda_min),
        lambda_max=or_zero(report.lambda_max),
        ortho_err=report.ortho_error,
        step_norm=report.step_norm,
        event=report.event,
    )


def run_single(config, optimizer_index, seed):
    """
    One optimizer on a fresh problem until the gradient-evaluation budget is
    spent. Errors end this run only and are recorded on the trace.
    """
    spec = config.optimizers[optimizer_index]
    problem = make_problem(config.problem.kind, config.problem.params)
    oracle = GradientOracle(problem, noise_stream(config, optimizer_index, seed))
    floor = problem.objective_floor
    trace = RunTrace(optimizer=spec.name, kind=spec.kind, seed=seed)

    logger.info(f'Starting {trace.label} on {problem!r} with budget {config.budget}')
    started = time.perf_counter()
    try:
        optimizer = build_optimizer(spec, problem.initial_point(seed), seed)
        while oracle.evaluations < config.budget:
            report = optimizer.step(oracle)
            objective = float(report.objective_after)
            if not np.isfinite(objective):
                raise FloatingPointError(f'objective became {objective} at step {report.step}')
            trace.final_objective = objective
            if report.step % config.stride == 0:
                trace.rows.append(_row(report))
            if (trace.steps_to_threshold is None and floor is not None
                    and objective - floor <= config.threshold):
                trace.steps_to_threshold = report.step
    except (OGRError, FloatingPointError, np.linalg.LinAlgError) as exc:
        trace.error = f'{type(exc).__name__}: {exc}'
        logger.error(f'Run {trace.label} failed after {oracle.evaluations} evaluations: {exc}',
                     exc_info=True)

    trace.evaluations = oracle.evaluations
    trace.wall_time = time.perf_counter() - started
    if trace.rows:
        trace.best_objective = min(row.objective for row in trace.rows)
    else:
        trace.best_objective = trace.final_objective
    if floor is not None and trace.final_objective is not None:
        trace.final_gap = trace.final_objective - floor
    logger.info(f'Finished {trace.label}: final objective {trace.final_objective}, '
                f'{trace.evaluations} evaluations, {trace.wall_time:.2f}s')
    return trace


def run_payload(payload):
    """Worker entry point: JSON payload in, serialized RunTrace out."""
    config = load_config(payload['config'])
    return run_single(config, payload['optimizer_index'], payload['seed']).to_dict()


def _payloads(config):
    data = config.to_dict()
    return [
        {'config': data, 'optimizer_index': index, 'seed': seed}
        for index in range(len(config.optimizers))
        for seed in config.seeds
    ]


def _dispatch(payloads, parallel, progress):
    bar = tqdm(total=len(payloads), desc='runs', unit='run', file=sys.stderr, disable=not progress)
    try:
        if parallel <= 1:
            for payload in payloads:
                yield run_payload(payload)
                bar.update(1)
        elif settings.CELERY_TASK_ALWAYS_EAGER:
            from billiard.pool import Pool

            pool = Pool(processes=parallel)
            try:
                for result in pool.imap(run_payload, payloads):
                    yield result
                    bar.update(1)
            finally:
                pool.terminate()
                pool.join()
        else:
            from celery import group

            from ...tasks import execute_run

            results = group(execute_run.s(payload) for payload in payloads).apply_async()
            for result in results.get():
                yield result
                bar.update(1)
    finally:
        bar.close()


def run_experiment(config, out=None, parallel=1, progress=False):
    """
    Every (optimizer, seed) pair of ``config``. Traces come back in
    (optimizer, seed) order whatever the scheduling, and are written to
    ``out`` (or the config's own ``out``) when one is given.
    """
    payloads = _payloads(config)
    logger.info(f'Experiment {config.name!r}: {len(payloads)} runs, parallel={parallel}')
    traces = [RunTrace.from_dict(result) for result in _dispatch(payloads, parallel, progress)]
    order = {}
    for spec in config.optimizers:
        for seed in config.seeds:
            order[(spec.name, seed)] = len(order)
    traces.sort(key=lambda trace: order[(trace.optimizer, trace.seed)])

    directory = out or config.out
    if directory:
        directory = Path(directory)
        for trace in traces:
            write_trace(trace, directory)
        floor = make_problem(config.problem.kind, config.problem.params).objective_floor
        write_summary(config, traces, directory, objective_floor=floor)
    return traces
