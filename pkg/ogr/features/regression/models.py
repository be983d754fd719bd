from dataclasses import dataclass, field

import numpy as np


@dataclass(eq=False)
class RegressionState:
    """
    Exponential-moving-average sufficient statistics of (position, gradient)
    pairs expressed in the d tracked coordinates.

    ``s`` is the total EMA weight (1 − βᵗ after t updates); the other fields
    are the weighted sums θ̄, ḡ, θθ̄ (θ·θᵀ) and gθ̄ (g·θᵀ).
    """
    dim: int
    s: float = 0.0
    theta_bar: np.ndarray = None
    g_bar: np.ndarray = None
    theta_theta_bar: np.ndarray = None
    g_theta_bar: np.ndarray = None
    updates: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.theta_bar is None:
            self.theta_bar = np.zeros(self.dim)
        if self.g_bar is None:
            self.g_bar = np.zeros(self.dim)
        if self.theta_theta_bar is None:
            self.theta_theta_bar = np.zeros((self.dim, self.dim))
        if self.g_theta_bar is None:
            self.g_theta_bar = np.zeros((self.dim, self.dim))

    @classmethod
    def zeros(cls, dim):
        return cls(dim=dim)

    def copy(self):
        return RegressionState(
            dim=self.dim,
            s=self.s,
            theta_bar=self.theta_bar.copy(),
            g_bar=self.g_bar.copy(),
            theta_theta_bar=self.theta_theta_bar.copy(),
            g_theta_bar=self.g_theta_bar.copy(),
            updates=self.updates,
        )

    def centered_covariance(self):
        """s·θθ̄ − θ̄·θ̄ᵀ: s² times the weighted covariance of θ."""
        return self.s * self.theta_theta_bar - np.outer(self.theta_bar, self.theta_bar)

    def centered_cross(self):
        """s·gθ̄ − ḡ·θ̄ᵀ: s² times the weighted cross-covariance of g and θ."""
        return self.s * self.g_theta_bar - np.outer(self.g_bar, self.theta_bar)


@dataclass(eq=False)
class CurvatureModel:
    """
    Per-direction curvatures (clipped, |λᵢ| ≥ ε) and stationary coordinates.
    """
    lambdas: np.ndarray
    ps: np.ndarray

    @property
    def dim(self):
        return self.lambdas.shape[0]
