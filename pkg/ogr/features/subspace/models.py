from dataclasses import dataclass

import numpy as np


@dataclass(eq=False)
class Basis:
    """
    d tracked directions in the D-dimensional parameter space.

    ``vectors`` is the d×D array whose rows are v₁..v_d. The rows are kept
    near-orthonormal: within the loose tolerance between orthonormalization
    passes and within the tight one right after a pass.
    """
    vectors: np.ndarray

    @property
    def dim(self):
        return self.vectors.shape[0]

    @property
    def ambient_dim(self):
        return self.vectors.shape[1]

    @property
    def matrix(self):
        return self.vectors

    def gram(self):
        return self.vectors @ self.vectors.T

    def ortho_error(self):
        """max |vᵢ·vⱼ − δᵢⱼ|"""
        return float(np.max(np.abs(self.gram() - np.eye(self.dim))))

    def copy(self):
        return Basis(vectors=self.vectors.copy())
