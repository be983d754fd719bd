import logging

import numpy as np

from ...exceptions import ContractViolation, DegenerateBasis
from ..linalg.services import orthogonality_error
from ..regression.models import RegressionState
from ..utils import as_square, as_vector
from .models import Basis

logger = logging.getLogger(__name__)

ORTHO_TOL_LOOSE = 1e-3
ORTHO_TOL_TIGHT = 1e-8
ORTHO_MAX_ITER = 20
DEGENERATE_NORM = 1e-10
ROTATION_TOL = 1e-10


def random_basis(d, D, rng):
    """Standard-normal directions, orthonormalized."""
    if not 1 <= d <= D:
        raise ContractViolation(f'basis needs 1 <= d <= D, got d={d}, D={D}')
    return orthonormalize(Basis(vectors=rng.standard_normal((d, D))))


def coords(x, basis):
    """(x·v₁, …, x·v_d)"""
    x = as_vector(x, basis.ambient_dim, name='x')
    return basis.vectors @ x


def residual(g, basis):
    """g̃ = g − Σᵢ (g·vᵢ)·vᵢ: the part of g the basis cannot represent."""
    g = as_vector(g, basis.ambient_dim, name='g')
    return g - basis.vectors.T @ (basis.vectors @ g)


def exploration_rates(gamma, lambdas=None, kappa=None, epsilon=1e-8):
    """
    Per-direction exploration rates.

    Uniform γ unless ``kappa`` is set and curvatures are known; then
    γᵢ ∝ max(|λᵢ|, ε)^(−κ), rescaled so their mean is γ.
    """
    if kappa is None or lambdas is None:
        return gamma
    weights = np.maximum(np.abs(np.asarray(lambdas, dtype=np.float64)), epsilon) ** (-kappa)
    return gamma * weights / np.mean(weights)


def explore(basis, g_residual, gamma):
    """
    Rotate every vᵢ toward g̃ while keeping the set near-orthonormal.

    vᵢ ← Γᵢᵢ·vᵢ + Σⱼ≠ᵢ Γᵢⱼ·vⱼ + γᵢ·g̃ with Γᵢᵢ = 1 − ½γᵢ²‖g̃‖² and
    Γᵢⱼ = −½γᵢγⱼ‖g̃‖²; for uniform γ this is vᵢ ← vᵢ + γ·g̃ − v̄ with
    v̄ = ½γ²‖g̃‖²·Σⱼ vⱼ. Pairwise dot products drift only at O(γ³).
    """
    g_residual = as_vector(g_residual, basis.ambient_dim, name='g_residual')
    gammas = np.broadcast_to(np.asarray(gamma, dtype=np.float64), (basis.dim,))
    norm2 = float(g_residual @ g_residual)
    if norm2 == 0.0 or not np.any(gammas):
        return basis.copy()

    V = basis.vectors
    pull = 0.5 * norm2 * np.outer(gammas, gammas @ V)
    return Basis(vectors=V - pull + np.outer(gammas, g_residual))


def _normalized_rows(U):
    norms = np.linalg.norm(U, axis=1)
    small = np.flatnonzero(norms < DEGENERATE_NORM)
    if small.size:
        raise DegenerateBasis(
            f'basis vector {small[0]} collapsed (norm {norms[small[0]]:.3e})',
            index=int(small[0]),
        )
    return U / norms[:, None]


def damped_symmetric_step(V):
    """uᵢ = vᵢ − ½·Σⱼ≠ᵢ (vᵢ·vⱼ)·vⱼ for every row at once (no normalization)."""
    overlaps = V @ V.T
    np.fill_diagonal(overlaps, 0.0)
    return V - 0.5 * overlaps @ V


def gram_schmidt(V):
    """Sequential Gram-Schmidt in index order, each projection applied twice."""
    Q = np.array(V, dtype=np.float64)
    for i in range(Q.shape[0]):
        for _ in range(2):
            Q[i] -= Q[:i].T @ (Q[:i] @ Q[i])
        norm = np.linalg.norm(Q[i])
        if norm < DEGENERATE_NORM:
            raise DegenerateBasis(f'basis vector {i} is linearly dependent on earlier ones', index=i)
        Q[i] /= norm
    return Q


def orthonormalize(basis, tol=ORTHO_TOL_TIGHT, max_iter=ORTHO_MAX_ITER):
    """
    Order-independent orthonormalization.

    Repeats the damped symmetric step followed by normalization until
    max |vᵢ·vⱼ − δᵢⱼ| ≤ tol. The undamped step maps an overlap δ to −δ and
    never converges; with the ½ damping two unit vectors go from δ to δ³/4.
    Falls back to Gram-Schmidt in index order after ``max_iter`` passes.
    """
    V = _normalized_rows(np.array(basis.vectors, dtype=np.float64))
    for _ in range(max_iter):
        if np.max(np.abs(V @ V.T - np.eye(V.shape[0]))) <= tol:
            return Basis(vectors=V)
        V = _normalized_rows(damped_symmetric_step(V))

    if np.max(np.abs(V @ V.T - np.eye(V.shape[0]))) <= tol:
        return Basis(vectors=V)
    logger.warning(f'Symmetric orthonormalization did not reach {tol:g} in {max_iter} passes; '
                   f'using Gram-Schmidt')
    return Basis(vectors=gram_schmidt(basis.vectors))


def repair_basis(basis, index, rng):
    """
    Replace vector ``index`` with a fresh random unit vector orthogonal to the
    remaining ones.
    """
    others = np.delete(basis.vectors, index, axis=0)
    if others.shape[0] >= basis.ambient_dim:
        raise DegenerateBasis('no room left for a replacement direction', index=index)
    others = gram_schmidt(others) if others.shape[0] else others
    while True:
        fresh = rng.standard_normal(basis.ambient_dim)
        for _ in range(2):
            fresh -= others.T @ (others @ fresh)
        norm = np.linalg.norm(fresh)
        if norm > DEGENERATE_NORM:
            break
    vectors = basis.vectors.copy()
    vectors[index] = fresh / norm
    logger.info(f'Replaced degenerate basis vector {index}')
    return Basis(vectors=vectors)


def rotate_state(basis, state, O):
    """
    Rotate basis and averages together by the orthogonal d×d matrix O.

    New vᵢ = Σⱼ Oᵢⱼ·vⱼ; θ̄ ← O·θ̄, ḡ ← O·ḡ, θθ̄ ← O·θθ̄·Oᵀ, gθ̄ ← O·gθ̄·Oᵀ; s is
    unchanged. Afterwards coords(x, new) = O·coords(x, old) for every x.
    """
    O = as_square(O, basis.dim, name='O')
    if state.dim != basis.dim:
        raise ContractViolation(f'state dimension {state.dim} does not match basis dimension {basis.dim}')
    error = orthogonality_error(O)
    if error > ROTATION_TOL:
        raise ContractViolation(f'rotation is not orthogonal (error {error:.3e})')

    rotated_basis = Basis(vectors=O @ basis.vectors)
    rotated_state = RegressionState(
        dim=state.dim,
        s=state.s,
        theta_bar=O @ state.theta_bar,
        g_bar=O @ state.g_bar,
        theta_theta_bar=O @ state.theta_theta_bar @ O.T,
        g_theta_bar=O @ state.g_theta_bar @ O.T,
        updates=state.updates,
    )
    return rotated_basis, rotated_state
