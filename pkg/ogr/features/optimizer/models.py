from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from ...exceptions import ConfigurationError
from ..regression.models import RegressionState
from ..subspace.models import Basis


MODE_CHOICES = ('diagonal', 'entangled')
STEP_RULE_CHOICES = ('sign', 'tanh', 'newton', 'gradient_fraction')
BASELINE_CHOICES = ('sgd', 'momentum', 'adam')


@dataclass(frozen=True)
class OptimizerConfig:
    """
    Hyperparameters of the online gradient regression optimizer.

    ``warmup_steps`` defaults to 3·d when left unset.
    """
    d: int = 10
    alpha: float = 0.5
    beta: float = 0.9
    gamma: float = 1e-3
    epsilon: float = 1e-8
    eta: float = 1e-2
    warmup_steps: Optional[int] = None
    diag_period: int = 20
    ortho_period: int = 20
    mode: str = 'diagonal'
    explore_kappa: Optional[float] = None
    max_step_norm: Optional[float] = None
    step_cap_factor: Optional[float] = 10.0
    step_rule: str = 'sign'
    tanh_scale: float = 1.0
    negative_gradient_fraction: float = 0.1
    warmup_gamma_scale: float = 1.0
    # nonzero: noiseless gradients alone leave the averages without spread after warmup
    warmup_probe: float = 0.5
    probe_std: float = 0.0
    ortho_tol_loose: float = 1e-3
    ortho_tol_tight: float = 1e-8

    def __post_init__(self):
        if self.warmup_steps is None:
            object.__setattr__(self, 'warmup_steps', 3 * self.d)
        self.validate()

    def validate(self):
        checks = [
            ('d', self.d >= 1, 'must be a positive integer'),
            ('alpha', 0.0 < self.alpha <= 1.0, 'must lie in (0, 1]'),
            ('beta', 0.0 < self.beta < 1.0, 'must lie in (0, 1)'),
            ('gamma', self.gamma >= 0.0, 'must be non-negative'),
            ('epsilon', self.epsilon > 0.0, 'must be positive'),
            ('eta', self.eta >= 0.0, 'must be non-negative'),
            ('warmup_steps', self.warmup_steps >= 2, 'must be at least 2'),
            ('diag_period', self.diag_period >= 1, 'must be at least 1'),
            ('ortho_period', self.ortho_period >= 1, 'must be at least 1'),
            ('mode', self.mode in MODE_CHOICES, f'must be one of {MODE_CHOICES}'),
            ('explore_kappa', self.explore_kappa is None or self.explore_kappa >= 0.0,
             'must be non-negative'),
            ('max_step_norm', self.max_step_norm is None or self.max_step_norm > 0.0,
             'must be positive'),
            ('step_cap_factor', self.step_cap_factor is None or self.step_cap_factor > 0.0,
             'must be positive'),
            ('step_rule', self.step_rule in STEP_RULE_CHOICES, f'must be one of {STEP_RULE_CHOICES}'),
            ('tanh_scale', self.tanh_scale > 0.0, 'must be positive'),
            ('negative_gradient_fraction', self.negative_gradient_fraction >= 0.0,
             'must be non-negative'),
            ('warmup_gamma_scale', self.warmup_gamma_scale >= 0.0, 'must be non-negative'),
            ('warmup_probe', self.warmup_probe >= 0.0, 'must be non-negative'),
            ('probe_std', self.probe_std >= 0.0, 'must be non-negative'),
            ('ortho_tol_loose', self.ortho_tol_loose > self.ortho_tol_tight > 0.0,
             'must exceed ortho_tol_tight, which must be positive'),
        ]
        for key, ok, message in checks:
            if not ok:
                raise ConfigurationError(f'{message} (got {getattr(self, key)!r})', key=key)

    def to_dict(self):
        return asdict(self)


@dataclass(eq=False)
class OptimizerState:
    """Everything an OGR run carries from one step to the next."""
    theta: np.ndarray
    basis: Basis
    regression: RegressionState
    rng: np.random.Generator
    t: int = 0
    lambdas: Optional[np.ndarray] = None
    ps: Optional[np.ndarray] = None
    step_ms: float = 0.0
    step_weight: float = 0.0
    warmup_done: bool = False


@dataclass(frozen=True)
class BaselineConfig:
    kind: str = 'sgd'
    lr: float = 1e-2
    momentum: float = 0.9
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        checks = [
            ('kind', self.kind in BASELINE_CHOICES, f'must be one of {BASELINE_CHOICES}'),
            ('lr', self.lr > 0.0, 'must be positive'),
            ('momentum', 0.0 <= self.momentum < 1.0, 'must lie in [0, 1)'),
            ('beta1', 0.0 < self.beta1 < 1.0, 'must lie in (0, 1)'),
            ('beta2', 0.0 < self.beta2 < 1.0, 'must lie in (0, 1)'),
            ('eps', self.eps > 0.0, 'must be positive'),
        ]
        for key, ok, message in checks:
            if not ok:
                raise ConfigurationError(f'{message} (got {getattr(self, key)!r})', key=key)

    def to_dict(self):
        return asdict(self)


@dataclass(eq=False)
class BaselineState:
    theta: np.ndarray
    t: int = 0
    m: Optional[np.ndarray] = None
    v: Optional[np.ndarray] = None


@dataclass(eq=False)
class StepReport:
    """What one optimizer step did; the source of every trace row."""
    step: int
    objective_before: Optional[float] = None
    objective_after: Optional[float] = None
    grad_norm: float = 0.0
    residual_norm: float = 0.0
    lambdas: Optional[np.ndarray] = None
    ps: Optional[np.ndarray] = None
    step_norm: float = 0.0
    ortho_error: float = 0.0
    warmup: bool = False
    diagonalized: bool = False
    orthonormalized: bool = False
    diagonalization_skipped: bool = False
    basis_repaired: bool = False
    fallback_directions: List[int] = field(default_factory=list)

    @property
    def lambda_min(self):
        return None if self.lambdas is None else float(np.min(self.lambdas))

    @property
    def lambda_max(self):
        return None if self.lambdas is None else float(np.max(self.lambdas))

    @property
    def event(self):
        """'|'-joined event flags, empty for a plain step."""
        flags = []
        if self.warmup:
            flags.append('warmup')
        if self.diagonalized:
            flags.append('diag')
        if self.diagonalization_skipped:
            flags.append('diag_skipped')
        if self.orthonormalized:
            flags.append('ortho')
        if self.basis_repaired:
            flags.append('repair')
        if self.fallback_directions:
            flags.append(f'fallback{len(self.fallback_directions)}')
        return '|'.join(flags)
