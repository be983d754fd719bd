import copy
from dataclasses import dataclass, field
from typing import List, Optional

from ..optimizer.models import BaselineConfig, OptimizerConfig

TRACE_COLUMNS = (
    'step', 'objective', 'grad_norm', 'residual_norm', 'lambda_min',
    'lambda_max', 'ortho_err', 'step_norm', 'event',
)


@dataclass(frozen=True)
class ProblemSpec:
    kind: str
    params: dict

    def to_dict(self):
        return {'kind': self.kind, 'params': copy.deepcopy(self.params)}


@dataclass(frozen=True)
class OptimizerSpec:
    kind: str
    name: str
    params: dict

    def build_config(self):
        if self.kind == 'ogr':
            return OptimizerConfig(**self.params)
        return BaselineConfig(kind=self.kind, **self.params)

    def to_dict(self):
        return {'kind': self.kind, 'name': self.name, 'params': copy.deepcopy(self.params)}


@dataclass(frozen=True)
class ExperimentConfig:
    """
    One experiment: a problem, the optimizers to compare on it and the
    seeds to run each with. ``budget`` counts gradient evaluations.
    """
    name: str
    problem: ProblemSpec
    optimizers: List[OptimizerSpec]
    budget: int
    seeds: List[int]
    stride: int
    threshold: float = 1e-6
    common_random_numbers: bool = True
    out: Optional[str] = None

    def to_dict(self):
        return {
            'name': self.name,
            'problem': self.problem.to_dict(),
            'optimizers': [spec.to_dict() for spec in self.optimizers],
            'budget': self.budget,
            'seeds': list(self.seeds),
            'stride': self.stride,
            'threshold': self.threshold,
            'common_random_numbers': self.common_random_numbers,
            'out': self.out,
        }


@dataclass
class TraceRow:
    step: int
    objective: float
    grad_norm: float
    residual_norm: float
    lambda_min: float
    lambda_max: float
    ortho_err: float
    step_norm: float
    event: str = ''

    def as_list(self):
        return [getattr(self, column) for column in TRACE_COLUMNS]


@dataclass
class RunTrace:
    """Recorded rows of one (optimizer, seed) run and its summary."""
    optimizer: str
    kind: str
    seed: int
    rows: List[TraceRow] = field(default_factory=list)
    final_objective: Optional[float] = None
    best_objective: Optional[float] = None
    final_gap: Optional[float] = None
    steps_to_threshold: Optional[int] = None
    evaluations: int = 0
    wall_time: float = 0.0
    error: Optional[str] = None

    @property
    def label(self):
        return f'{self.optimizer}_seed{self.seed}'

    @property
    def failed(self):
        return self.error is not None

    def summary(self):
        return {
            'optimizer': self.optimizer,
            'kind': self.kind,
            'seed': self.seed,
            'final_objective': self.final_objective,
            'best_objective': self.best_objective,
            'final_gap': self.final_gap,
            'steps_to_threshold': self.steps_to_threshold,
            'evaluations': self.evaluations,
            'recorded_rows': len(self.rows),
            'wall_time': self.wall_time,
            'error': self.error,
            'trace': f'{self.label}.csv',
        }

    def to_dict(self):
        data = self.summary()
        data['rows'] = [row.as_list() for row in self.rows]
        return data

    @classmethod
    def from_dict(cls, data):
        return cls(
            optimizer=data['optimizer'],
            kind=data['kind'],
            seed=data['seed'],
            rows=[TraceRow(*values) for values in data['rows']],
            final_objective=data['final_objective'],
            best_objective=data['best_objective'],
            final_gap=data['final_gap'],
            steps_to_threshold=data['steps_to_threshold'],
            evaluations=data['evaluations'],
            wall_time=data['wall_time'],
            error=data['error'],
        )
