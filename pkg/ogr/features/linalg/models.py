from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class EigenPair:
    """
    Eigendecomposition A = Oᵀ·diag(eigenvalues)·O of a small symmetric matrix.

    Rows of ``rotation`` are eigenvectors; eigenvalues are ordered by
    descending magnitude, ties broken by descending value.
    """
    eigenvalues: np.ndarray
    rotation: np.ndarray

    @property
    def order(self):
        return self.eigenvalues.shape[0]

    def reconstruct(self):
        return self.rotation.T @ np.diag(self.eigenvalues) @ self.rotation
