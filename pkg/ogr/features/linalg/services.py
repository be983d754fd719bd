import logging
import math

import numpy as np
from scipy import linalg as sla

from ...exceptions import ContractViolation, InsufficientSpread
from ..utils import as_square
from .models import EigenPair

logger = logging.getLogger(__name__)

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 50
SYMMETRY_TOL = 1e-10
SPREAD_FLOOR = 1e-12


def _symmetry_error(A):
    scale = max(np.max(np.abs(A)), 1.0)
    return np.max(np.abs(A - A.T)) / scale


def _off_norm(A):
    return math.sqrt(max(np.sum(A * A) - np.sum(np.diag(A) ** 2), 0.0))


def _rotate(A, V, p, q):
    """One Jacobi rotation annihilating A[p, q] (A and V updated in place)."""
    apq = float(A[p, q])
    app = float(A[p, p])
    aqq = float(A[q, q])
    theta = (aqq - app) / (2.0 * apq)
    sign = 1.0 if theta >= 0.0 else -1.0
    t = sign / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c

    col_p = A[:, p].copy()
    col_q = A[:, q].copy()
    A[:, p] = c * col_p - s * col_q
    A[:, q] = s * col_p + c * col_q
    A[p, :] = A[:, p]
    A[q, :] = A[:, q]
    A[p, p] = app - t * apq
    A[q, q] = aqq + t * apq
    A[p, q] = 0.0
    A[q, p] = 0.0

    vec_p = V[:, p].copy()
    vec_q = V[:, q].copy()
    V[:, p] = c * vec_p - s * vec_q
    V[:, q] = s * vec_p + c * vec_q


def eigh_small(A, tol=JACOBI_TOL):
    """
    Cyclic Jacobi eigendecomposition of a small symmetric matrix.

    Sweeps run in fixed (p, q) order until the off-diagonal Frobenius norm is
    at most ``tol`` times the matrix norm, or 50 sweeps have run. Eigenvalues
    come out sorted by descending |λ| (ties: larger value first); each
    eigenvector's largest-magnitude component is made positive so identical
    input always gives identical output.
    """
    A = as_square(A, name='A')
    if not np.all(np.isfinite(A)):
        raise ContractViolation('eigh_small requires finite entries')
    if _symmetry_error(A) > SYMMETRY_TOL:
        raise ContractViolation(
            f'eigh_small requires a symmetric matrix (asymmetry {_symmetry_error(A):.3e})'
        )

    n = A.shape[0]
    work = 0.5 * (A + A.T)
    V = np.eye(n)
    scale = np.linalg.norm(work)

    # entries this small cannot hold the off-norm above tol for n <= 64
    negligible = 1e-15 * scale
    sweeps = 0
    while sweeps < JACOBI_MAX_SWEEPS and _off_norm(work) > tol * scale:
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(work[p, q]) > negligible:
                    _rotate(work, V, p, q)
        sweeps += 1

    if _off_norm(work) > tol * scale:
        logger.warning(f'Jacobi stopped after {sweeps} sweeps with off-norm '
                       f'{_off_norm(work):.3e} (matrix norm {scale:.3e})')

    eigenvalues = np.diag(work).copy()
    order = np.lexsort((-eigenvalues, -np.abs(eigenvalues)))
    eigenvalues = eigenvalues[order]
    rotation = V[:, order].T.copy()

    for row in rotation:
        if row[np.argmax(np.abs(row))] < 0.0:
            row *= -1.0

    return EigenPair(eigenvalues=eigenvalues, rotation=rotation)


def orthogonality_error(O):
    O = as_square(O, name='O')
    return float(np.max(np.abs(O @ O.T - np.eye(O.shape[0]))))


def spd_floor_check(M, floor=SPREAD_FLOOR):
    """
    Return the smallest eigenvalue of the symmetric matrix ``M``.

    Raises InsufficientSpread when it falls below ``floor`` times the largest
    one (or the largest is not positive).
    """
    M = as_square(M, name='M')
    eigenvalues = np.linalg.eigvalsh(0.5 * (M + M.T))
    smallest, largest = float(eigenvalues[0]), float(eigenvalues[-1])
    if largest <= 0.0 or smallest < floor * largest:
        raise InsufficientSpread(
            f'insufficient spread: smallest covariance eigenvalue {smallest:.3e} '
            f'vs largest {largest:.3e}',
            smallest_eigenvalue=smallest,
        )
    return smallest


def right_divide(N, M, floor=SPREAD_FLOOR):
    """
    Solve X·M = N for symmetric positive definite M without forming M⁻¹.

    M is symmetric, so X·M = N is Mᵀ·Xᵀ = M·Xᵀ = Nᵀ and one Cholesky
    factorization serves every row of N.
    """
    M = as_square(M, name='M')
    N = np.asarray(N, dtype=np.float64)
    if N.ndim != 2 or N.shape[1] != M.shape[0]:
        raise ContractViolation(f'N has shape {N.shape}, incompatible with M of order {M.shape[0]}')
    M = 0.5 * (M + M.T)
    spd_floor_check(M, floor=floor)
    try:
        factor = sla.cho_factor(M, lower=True)
    except np.linalg.LinAlgError as exc:
        raise InsufficientSpread(f'Cholesky factorization failed: {exc}') from exc
    return sla.cho_solve(factor, N.T).T
