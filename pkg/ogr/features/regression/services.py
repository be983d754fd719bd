import logging

import numpy as np

from ...exceptions import ConfigurationError, ContractViolation, InsufficientSpread
from ..linalg.services import SPREAD_FLOOR, eigh_small, right_divide
from ..utils import as_square, as_vector
from .models import CurvatureModel, RegressionState

logger = logging.getLogger(__name__)


def update_averages(state, theta_coords, g_coords, beta):
    """
    Fold one (θ, g) sample, given in tracked coordinates, into the averages.

    Every accumulator x becomes β·x + (1 − β)·(sample term), and s becomes
    β·s + (1 − β), so that s = 1 − βᵗ after t updates from zero.
    """
    if not 0.0 < beta < 1.0:
        raise ConfigurationError(f'beta must lie in (0, 1), got {beta}', key='beta')
    theta = as_vector(theta_coords, state.dim, name='theta_coords')
    g = as_vector(g_coords, state.dim, name='g_coords')

    weight = 1.0 - beta
    return RegressionState(
        dim=state.dim,
        s=beta * state.s + weight,
        theta_bar=beta * state.theta_bar + weight * theta,
        g_bar=beta * state.g_bar + weight * g,
        theta_theta_bar=beta * state.theta_theta_bar + weight * np.outer(theta, theta),
        g_theta_bar=beta * state.g_theta_bar + weight * np.outer(g, theta),
        updates=state.updates + 1,
    )


def clip(x, epsilon):
    """
    sign(x)·max(|x|, ε) with sign(0) = +1; works on scalars and arrays.
    """
    if epsilon <= 0.0:
        raise ConfigurationError(f'epsilon must be positive, got {epsilon}', key='epsilon')
    x = np.asarray(x, dtype=np.float64)
    clipped = np.where(x >= 0.0, 1.0, -1.0) * np.maximum(np.abs(x), epsilon)
    return float(clipped) if clipped.ndim == 0 else clipped


def estimate_1d(state, i, epsilon):
    """
    Least-squares fit of gᵢ ≈ λ·(θᵢ − p) on the averages of direction i.

    λ is the weighted cov(g, θ)/var(θ) clipped away from zero; p is computed
    with the clipped λ so it is always finite.
    """
    if not 0 <= i < state.dim:
        raise ContractViolation(f'direction {i} out of range for dimension {state.dim}')
    s = state.s
    theta_bar = state.theta_bar[i]
    g_bar = state.g_bar[i]
    second_moment = s * state.theta_theta_bar[i, i]
    variance = second_moment - theta_bar * theta_bar
    if variance <= 0.0 or variance <= SPREAD_FLOOR * second_moment:
        raise InsufficientSpread(
            f'insufficient spread in direction {i}: variance term {variance:.3e}',
            smallest_eigenvalue=float(variance),
            direction=i,
        )
    covariance = s * state.g_theta_bar[i, i] - g_bar * theta_bar
    lam = clip(covariance / variance, epsilon)
    p = (lam * theta_bar - g_bar) / (s * lam)
    return lam, float(p)


def estimate_curvatures(state, epsilon):
    """
    Run estimate_1d in every direction.

    Returns the CurvatureModel and the list of directions that lacked spread;
    those get λ = +ε and p at the current coordinate mean so that callers can
    fall back to plain gradient steps there.
    """
    lambdas = np.full(state.dim, float(epsilon))
    ps = np.zeros(state.dim)
    if state.s > 0.0:
        ps = state.theta_bar / state.s
    failed = []
    for i in range(state.dim):
        try:
            lambdas[i], ps[i] = estimate_1d(state, i, epsilon)
        except InsufficientSpread:
            failed.append(i)
    if failed:
        logger.debug(f'No regression spread yet in directions {failed}')
    return CurvatureModel(lambdas=lambdas, ps=ps), failed


def estimate_hessian(state):
    """
    H = (s·gθ̄ − ḡ·θ̄ᵀ)·(s·θθ̄ − θ̄·θ̄ᵀ)⁻¹ by right-division, symmetrized.
    """
    H = right_divide(state.centered_cross(), state.centered_covariance())
    return 0.5 * (H + H.T)


def estimate_stationary_point(state, H):
    """p = (θ̄ − H⁻¹·ḡ)/s: where the fitted linear gradient model vanishes."""
    H = as_square(H, state.dim, name='H')
    if state.s <= 0.0:
        raise InsufficientSpread('no samples have been averaged yet')
    try:
        newton = np.linalg.solve(H, state.g_bar)
    except np.linalg.LinAlgError as exc:
        raise ContractViolation(f'H is singular: {exc}') from exc
    return (state.theta_bar - newton) / state.s


def fit_entangled(state, epsilon):
    """
    Full-Hessian fit expressed in its eigenframe.

    Returns (CurvatureModel, O, H) where the model's λ are the clipped
    eigenvalues and its p are the stationary point's coordinates O·p, so that
    a per-direction step on the model is a step in the eigenframe.
    """
    H = estimate_hessian(state)
    pair = eigh_small(H)
    lambdas = clip(pair.eigenvalues, epsilon)
    O = pair.rotation
    clipped_H = O.T @ np.diag(lambdas) @ O
    p = estimate_stationary_point(state, clipped_H)
    return CurvatureModel(lambdas=np.atleast_1d(lambdas), ps=O @ p), O, H
