import numpy as np

from ..exceptions import ContractViolation


def as_vector(values, length=None, name='vector'):
    """
    Return ``values`` as a 1-D float64 array, checking its length when given.
    """
    array = np.asarray(values, dtype=np.float64)
    if array.ndim != 1:
        raise ContractViolation(f'{name} must be one-dimensional, got shape {array.shape}')
    if length is not None and array.shape[0] != length:
        raise ContractViolation(f'{name} has length {array.shape[0]}, expected {length}')
    return array


def as_square(values, order=None, name='matrix'):
    """
    Return ``values`` as a square float64 array, checking its order when given.
    """
    array = np.asarray(values, dtype=np.float64)
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise ContractViolation(f'{name} must be square, got shape {array.shape}')
    if order is not None and array.shape[0] != order:
        raise ContractViolation(f'{name} has order {array.shape[0]}, expected {order}')
    return array


def step_seed(*keys):
    """
    Deterministic seed material for one noisy evaluation.

    ``numpy.random.default_rng`` accepts a sequence of non-negative integers,
    so (run seed, step index) pairs map to independent streams.
    """
    return [int(key) for key in keys]


def or_zero(value):
    """Trace columns are numeric; quantities that do not exist are written as 0."""
    if value is None:
        return 0.0
    return float(value)
