import logging

import numpy as np

from ...exceptions import ConfigurationError
from ..utils import as_vector
from .models import BASELINE_CHOICES, BaselineConfig, BaselineState, StepReport

logger = logging.getLogger(__name__)


def _sgd(state, g, config):
    return BaselineState(theta=state.theta - config.lr * g, t=state.t + 1)


def _momentum(state, g, config):
    # EMA form: decay 0 is plain SGD
    previous = np.zeros_like(g) if state.m is None else state.m
    m = config.momentum * previous + (1.0 - config.momentum) * g
    return BaselineState(theta=state.theta - config.lr * m, t=state.t + 1, m=m)


def _adam(state, g, config):
    t = state.t + 1
    m = np.zeros_like(g) if state.m is None else state.m
    v = np.zeros_like(g) if state.v is None else state.v
    m = config.beta1 * m + (1.0 - config.beta1) * g
    v = config.beta2 * v + (1.0 - config.beta2) * (g * g)
    m_hat = m / (1.0 - config.beta1 ** t)
    v_hat = v / (1.0 - config.beta2 ** t)
    theta = state.theta - config.lr * m_hat / (np.sqrt(v_hat) + config.eps)
    return BaselineState(theta=theta, t=t, m=m, v=v)


UPDATE_RULES = {
    'sgd': _sgd,
    'momentum': _momentum,
    'adam': _adam,
}


def baseline_step(kind, state, oracle, config):
    """
    One step of a reference optimizer.

    sgd: θ ← θ − lr·g. momentum: m ← μ·m + (1 − μ)·g, θ ← θ − lr·m.
    adam: bias-corrected first and second moments,
    θ ← θ − lr·m̂/(√v̂ + eps).
    """
    if kind not in UPDATE_RULES:
        raise ConfigurationError(f'unknown baseline {kind!r}; choose from {BASELINE_CHOICES}', key='kind')
    with np.errstate(over='raise', invalid='raise'):
        objective_before = oracle.objective(state.theta)
        g = as_vector(oracle.gradient(state.theta), state.theta.shape[0], name='gradient')
        new_state = UPDATE_RULES[kind](state, g, config)
        report = StepReport(
            step=new_state.t,
            objective_before=objective_before,
            objective_after=oracle.objective(new_state.theta),
            grad_norm=float(np.linalg.norm(g)),
            step_norm=float(np.linalg.norm(new_state.theta - state.theta)),
        )
    return new_state, report


class BaselineOptimizer:

    def __init__(self, config, theta0, name=None):
        if not isinstance(config, BaselineConfig):
            config = BaselineConfig(**config)
        self.config = config
        self.name = name or config.kind
        self.state = BaselineState(theta=as_vector(theta0, name='theta0').copy())

    @property
    def theta(self):
        return self.state.theta

    def step(self, oracle):
        self.state, report = baseline_step(self.config.kind, self.state, oracle, self.config)
        return report

    def __repr__(self):
        return f'BaselineOptimizer(name={self.name!r}, t={self.state.t})'
