"""Brute-force reference computations the fast code is checked against."""
import numpy as np

from ogr.features.regression.models import RegressionState


def ema_weights(length, beta):
    """(1 − β)·β^(T − t) for t = 1..T."""
    ages = np.arange(length - 1, -1, -1)
    return (1.0 - beta) * beta ** ages


def direct_state(thetas, gs, beta):
    """RegressionState from explicit weighted sums over the whole history."""
    thetas = np.asarray(thetas, dtype=np.float64)
    gs = np.asarray(gs, dtype=np.float64)
    w = ema_weights(len(thetas), beta)
    return RegressionState(
        dim=thetas.shape[1],
        s=float(np.sum(w)),
        theta_bar=w @ thetas,
        g_bar=w @ gs,
        theta_theta_bar=np.einsum('t,ti,tj->ij', w, thetas, thetas),
        g_theta_bar=np.einsum('t,ti,tj->ij', w, gs, thetas),
        updates=len(thetas),
    )


def weighted_least_squares(thetas, gs, beta):
    """
    Fit g ≈ A·θ + b by weighted least squares over the full history with
    weights (1 − β)·β^(T − t). Returns (A, b).
    """
    thetas = np.asarray(thetas, dtype=np.float64)
    gs = np.asarray(gs, dtype=np.float64)
    root_w = np.sqrt(ema_weights(len(thetas), beta))
    design = np.hstack([thetas, np.ones((len(thetas), 1))]) * root_w[:, None]
    solution, *_ = np.linalg.lstsq(design, gs * root_w[:, None], rcond=None)
    return solution[:-1].T, solution[-1]


def line_fit(x, y, beta):
    """Weighted least squares y ≈ slope·x + intercept; returns (slope, root)."""
    A, b = weighted_least_squares(np.asarray(x)[:, None], np.asarray(y)[:, None], beta)
    slope = float(A[0, 0])
    return slope, -float(b[0]) / slope


def random_orthogonal(n, rng):
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.where(np.diag(R) < 0.0, -1.0, 1.0)


def random_spd(n, condition, rng):
    eigenvalues = np.logspace(0.0, np.log10(condition), n)
    Q = random_orthogonal(n, rng)
    H = (Q * eigenvalues) @ Q.T
    return 0.5 * (H + H.T)


def relative_error(actual, expected):
    return float(np.linalg.norm(np.asarray(actual) - np.asarray(expected)) / np.linalg.norm(expected))


class FunctionOracle:
    """Oracle over plain callables, counting gradient calls."""

    def __init__(self, gradient, objective=None):
        self._gradient = gradient
        self._objective = objective or (lambda theta: 0.0)
        self.evaluations = 0

    def gradient(self, theta):
        self.evaluations += 1
        return np.asarray(self._gradient(np.asarray(theta)), dtype=np.float64)

    def objective(self, theta):
        return float(self._objective(np.asarray(theta)))
