import logging
import math

import numpy as np

from ...exceptions import ConfigurationError, ContractViolation, DegenerateBasis, InsufficientSpread
from ..linalg.services import eigh_small
from ..regression.models import CurvatureModel, RegressionState
from ..regression.services import estimate_curvatures, estimate_hessian, fit_entangled, update_averages
from ..subspace.services import (
    coords,
    explore,
    exploration_rates,
    orthonormalize,
    random_basis,
    repair_basis,
    residual,
    rotate_state,
)
from ..utils import as_vector
from .models import OptimizerConfig, OptimizerState, StepReport

logger = logging.getLogger(__name__)


def init_optimizer(config, D, seed, theta0=None):
    """
    Fresh optimizer state: zeroed averages and a seeded random orthonormal
    basis. ``theta0`` defaults to the origin; the harness passes the
    problem's recommended starting point.
    """
    if config.d > D:
        raise ConfigurationError(f'd={config.d} exceeds the parameter dimension D={D}', key='d')
    rng = np.random.default_rng(seed)
    theta = np.zeros(D) if theta0 is None else as_vector(theta0, D, name='theta0').copy()
    return OptimizerState(
        theta=theta,
        basis=random_basis(config.d, D, rng),
        regression=RegressionState.zeros(config.d),
        rng=rng,
    )


def _try_diagonalize(state):
    try:
        H = estimate_hessian(state.regression)
    except InsufficientSpread as exc:
        logger.warning(f'Skipping diagonalization at step {state.t}: {exc}')
        return state, False
    pair = eigh_small(H)
    basis, regression = rotate_state(state.basis, state.regression, pair.rotation)
    logger.debug(f'Diagonalized at step {state.t}; eigenvalues {pair.eigenvalues}')
    return _replace(state, basis=basis, regression=regression), True


def diagonalize_now(state):
    """
    Rotate basis and averages into the eigenframe of the estimated Hessian.

    Without enough spread for the Hessian estimate the state is returned
    unchanged and a warning is logged.
    """
    state, _ = _try_diagonalize(state)
    return state


def _replace(state, **changes):
    fields = dict(
        theta=state.theta,
        basis=state.basis,
        regression=state.regression,
        rng=state.rng,
        t=state.t,
        lambdas=state.lambdas,
        ps=state.ps,
        step_ms=state.step_ms,
        step_weight=state.step_weight,
        warmup_done=state.warmup_done,
    )
    fields.update(changes)
    return OptimizerState(**fields)


def _orthonormalize(basis, rng, config):
    """Tight orthonormalization, replacing collapsed vectors until it succeeds."""
    repaired = False
    for _ in range(basis.dim + 1):
        try:
            return orthonormalize(basis, tol=config.ortho_tol_tight), repaired
        except DegenerateBasis as exc:
            logger.warning(f'Degenerate basis vector {exc.index}: {exc}')
            basis = repair_basis(basis, exc.index, rng)
            repaired = True
    raise DegenerateBasis('basis could not be repaired')


def _step_factors(lambdas, config):
    if config.step_rule == 'newton':
        return np.ones_like(lambdas)
    if config.step_rule == 'tanh':
        return np.tanh(lambdas / config.tanh_scale)
    return np.where(lambdas >= 0.0, 1.0, -1.0)


def _subspace_displacement(model, local_theta, local_g, failed, config):
    """
    α·factor(λᵢ)·(pᵢ − θᵢ) per direction, with the configured exceptions.

    Under the sign and tanh rules a negative-curvature direction moves at
    most α·|gᵢ|/|λᵢ|, the step the current gradient supports.
    """
    lambdas = model.lambdas
    delta = config.alpha * _step_factors(lambdas, config) * (model.ps - local_theta)
    negative = lambdas < 0.0
    if config.step_rule == 'gradient_fraction':
        delta[negative] = -config.negative_gradient_fraction * local_g[negative]
    elif config.step_rule in ('sign', 'tanh') and np.any(negative):
        bound = config.alpha * np.abs(local_g[negative]) / np.abs(lambdas[negative])
        delta[negative] = np.clip(delta[negative], -bound, bound)
    if failed:
        delta[failed] = -config.eta * local_g[failed]
    return delta


def _unresolved(model, failed, config):
    """Directions without spread, plus those whose |λ| sat on the ε floor."""
    floored = np.flatnonzero(np.abs(model.lambdas) <= config.epsilon).tolist()
    return sorted(set(failed) | set(floored))


def _step_rms(state):
    if state.step_weight <= 0.0:
        return None
    return math.sqrt(state.step_ms / state.step_weight)


def _step_limit(state, config):
    limits = []
    if config.max_step_norm is not None:
        limits.append(config.max_step_norm)
    rms = _step_rms(state)
    if config.step_cap_factor is not None and rms:
        limits.append(config.step_cap_factor * rms)
    return min(limits) if limits else None


def _cap(step, limit):
    """Returns (step, norm of the step taken, capped)."""
    norm = float(np.linalg.norm(step))
    if limit is not None and norm > limit:
        return step * (limit / norm), limit, True
    return step, norm, False


def _track_step(state, norm, capped, config):
    """
    EMA of squared step lengths behind the step cap. A capped step feeds at
    most the current RMS, so the cap never raises itself.
    """
    rms = _step_rms(state)
    if capped and rms is not None:
        norm = min(norm, rms)
    return (
        config.beta * state.step_ms + (1.0 - config.beta) * norm ** 2,
        config.beta * state.step_weight + (1.0 - config.beta),
    )


def _fit(regression, theta_c, g_c, config):
    """
    Returns (model, frame, failed): ``frame`` is the d×d rotation from basis
    coordinates to the model's coordinates, or None for the basis itself.
    """
    if config.mode == 'diagonal':
        model, failed = estimate_curvatures(regression, config.epsilon)
        return model, None, failed
    try:
        model, O, _ = fit_entangled(regression, config.epsilon)
        return model, O, []
    except InsufficientSpread as exc:
        logger.debug(f'Entangled fit unavailable, stepping by gradient: {exc}')
        model = CurvatureModel(lambdas=np.full(regression.dim, config.epsilon), ps=theta_c.copy())
        return model, None, list(range(regression.dim))


def warmup_step(state, oracle, config):
    """
    Plain SGD step that feeds the averages and the basis.

    θ ← θ − η·g, plus a random in-subspace probe of length
    ``warmup_probe``·η·‖g‖. The step is held to the same cap as regression
    steps and seeds its RMS. The last warmup step diagonalizes and
    orthonormalizes.
    """
    if state.warmup_done or state.t >= config.warmup_steps:
        raise ContractViolation(f'warmup already finished at step {state.t}')

    with np.errstate(over='raise', invalid='raise'):
        theta = state.theta
        basis = state.basis
        objective_before = oracle.objective(theta)
        g = as_vector(oracle.gradient(theta), theta.shape[0], name='gradient')
        t = state.t + 1

        regression = update_averages(state.regression, coords(theta, basis), coords(g, basis), config.beta)
        g_residual = residual(g, basis)

        step = -config.eta * g
        probe_length = config.warmup_probe * config.eta * float(np.linalg.norm(g))
        if probe_length > 0.0:
            direction = state.rng.standard_normal(basis.dim)
            step = step + basis.vectors.T @ (probe_length * direction / np.linalg.norm(direction))

        step, taken, capped = _cap(step, _step_limit(state, config))
        if capped:
            logger.debug(f'Capping warmup step to {taken:.3e} at step {t}')
        step_ms, step_weight = _track_step(state, taken, capped, config)

        new_state = _replace(
            state,
            theta=theta + step,
            basis=explore(basis, g_residual, config.gamma * config.warmup_gamma_scale),
            regression=regression,
            t=t,
            step_ms=step_ms,
            step_weight=step_weight,
        )
        report = StepReport(
            step=t,
            objective_before=objective_before,
            grad_norm=float(np.linalg.norm(g)),
            residual_norm=float(np.linalg.norm(g_residual)),
            step_norm=float(np.linalg.norm(step)),
            warmup=True,
        )

        if t == config.warmup_steps:
            new_state, report.diagonalized = _try_diagonalize(new_state)
            report.diagonalization_skipped = not report.diagonalized
            basis, report.basis_repaired = _orthonormalize(new_state.basis, new_state.rng, config)
            new_state = _replace(new_state, basis=basis, warmup_done=True)
            report.orthonormalized = True
            logger.info(f'Warmup finished after {t} steps')
        elif new_state.basis.ortho_error() > config.ortho_tol_loose:
            basis, report.basis_repaired = _orthonormalize(new_state.basis, new_state.rng, config)
            new_state = _replace(new_state, basis=basis)
            report.orthonormalized = True

        report.ortho_error = new_state.basis.ortho_error()
        report.objective_after = oracle.objective(new_state.theta)
    return new_state, report


def ogr_step(state, oracle, config):
    """
    One regression-driven step.

    1. draw g at θ and fold (coords θ, coords g) into the averages;
    2. fit (λᵢ, pᵢ) per direction, or the full Hessian in its eigenframe;
    3. move θ by α·sign(λᵢ)·(pᵢ − θᵢ) along each direction, capped;
    4. descend −η·g̃ along the residual and rotate the basis toward it;
    5. diagonalize and orthonormalize on their periods.

    Directions without regression spread take −η·gᵢ instead.
    """
    if not state.warmup_done:
        raise ContractViolation('ogr_step called before warmup finished')

    with np.errstate(over='raise', invalid='raise'):
        theta = state.theta
        basis = state.basis
        objective_before = oracle.objective(theta)
        g = as_vector(oracle.gradient(theta), theta.shape[0], name='gradient')
        t = state.t + 1

        theta_c = coords(theta, basis)
        g_c = coords(g, basis)
        regression = update_averages(state.regression, theta_c, g_c, config.beta)

        model, frame, failed = _fit(regression, theta_c, g_c, config)
        failed = _unresolved(model, failed, config)
        if frame is None:
            delta = _subspace_displacement(model, theta_c, g_c, failed, config)
            directions = basis.vectors
            basis_curvatures = model.lambdas
        else:
            delta = _subspace_displacement(model, frame @ theta_c, frame @ g_c, failed, config)
            directions = frame @ basis.vectors
            basis_curvatures = np.diag(frame.T @ np.diag(model.lambdas) @ frame)
        in_step = directions.T @ delta

        in_step, taken, capped = _cap(in_step, _step_limit(state, config))
        if capped:
            logger.debug(f'Capping in-subspace step to {taken:.3e} at step {t}')
        step_ms, step_weight = _track_step(state, taken, capped, config)

        if config.probe_std > 0.0:
            in_step = in_step + basis.vectors.T @ state.rng.normal(0.0, config.probe_std, basis.dim)

        g_residual = residual(g, basis)
        rates = exploration_rates(config.gamma, basis_curvatures, config.explore_kappa, config.epsilon)
        step = in_step - config.eta * g_residual

        new_state = _replace(
            state,
            theta=theta + step,
            basis=explore(basis, g_residual, rates),
            regression=regression,
            t=t,
            lambdas=model.lambdas,
            ps=model.ps,
            step_ms=step_ms,
            step_weight=step_weight,
        )
        report = StepReport(
            step=t,
            objective_before=objective_before,
            grad_norm=float(np.linalg.norm(g)),
            residual_norm=float(np.linalg.norm(g_residual)),
            lambdas=model.lambdas,
            ps=model.ps,
            step_norm=float(np.linalg.norm(step)),
            fallback_directions=failed,
        )

        if t % config.diag_period == 0:
            new_state, report.diagonalized = _try_diagonalize(new_state)
            report.diagonalization_skipped = not report.diagonalized

        if t % config.ortho_period == 0 or new_state.basis.ortho_error() > config.ortho_tol_loose:
            basis, report.basis_repaired = _orthonormalize(new_state.basis, new_state.rng, config)
            new_state = _replace(new_state, basis=basis)
            report.orthonormalized = True

        report.ortho_error = new_state.basis.ortho_error()
        report.objective_after = oracle.objective(new_state.theta)
    return new_state, report


class OGROptimizer:
    """
    Stateful front for the harness: warmup steps until the warmup budget is
    spent, regression steps afterwards.
    """

    def __init__(self, config, theta0, seed, name='ogr'):
        if not isinstance(config, OptimizerConfig):
            config = OptimizerConfig(**config)
        self.config = config
        self.name = name
        self.state = init_optimizer(config, len(theta0), seed, theta0)

    @property
    def theta(self):
        return self.state.theta

    @property
    def warmup_done(self):
        return self.state.warmup_done

    def step(self, oracle):
        if self.state.warmup_done:
            self.state, report = ogr_step(self.state, oracle, self.config)
        else:
            self.state, report = warmup_step(self.state, oracle, self.config)
        return report

    def __repr__(self):
        return f'OGROptimizer(name={self.name!r}, t={self.state.t}, d={self.config.d})'
