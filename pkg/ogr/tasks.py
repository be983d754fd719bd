# tasks.py
import logging

from celery import shared_task

from .features.harness.services import run_payload

# Get logger for this module
logger = logging.getLogger(__name__)


@shared_task(bind=True)
def execute_run(self, payload):
    """
    Run one (optimizer, seed) pair of an experiment and return its trace
    as a JSON-ready dict. Files are written by the caller.
    """
    logger.info(f"Starting run task (task_id: {self.request.id}) for optimizer "
                f"#{payload['optimizer_index']} seed {payload['seed']}")
    result = run_payload(payload)
    logger.info(f"Run task {self.request.id} completed: " + str({
        'optimizer': result['optimizer'],
        'seed': result['seed'],
        'evaluations': result['evaluations'],
        'final_objective': result['final_objective'],
        'error': result['error'],
    }))
    return result
