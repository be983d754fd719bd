from dataclasses import dataclass
from typing import Optional

import numpy as np

from ...exceptions import ConfigurationError
from ..utils import as_vector

FLAT_GRADIENT = 1e-3
SHELF_SAMPLES = 256


@dataclass(eq=False)
class GroundTruth:
    """Known Hessian and stationary point of a problem."""
    hessian: np.ndarray
    stationary_point: np.ndarray


@dataclass(eq=False)
class GradCheckReport:
    max_rel_error: float
    passed: bool
    h: float
    tol: float
    analytic: np.ndarray
    numeric: np.ndarray


class StochasticProblem:
    """
    Objective with an exact gradient and a noisy gradient oracle.

    Subclasses implement ``objective`` and ``gradient``; the default oracle
    adds isotropic Gaussian noise of scale ``noise`` seeded by the caller.
    """
    kind = None

    def __init__(self, dim, noise=0.0):
        if int(dim) < 1:
            raise ConfigurationError(f'must be a positive integer, got {dim}', key='dim')
        if noise < 0.0:
            raise ConfigurationError(f'must be non-negative, got {noise}', key='noise')
        self.dim = int(dim)
        self.noise = float(noise)

    @property
    def D(self):
        return self.dim

    def objective(self, theta):
        raise NotImplementedError

    def gradient(self, theta):
        raise NotImplementedError

    def hessian(self, theta):
        raise NotImplementedError(f'{self.kind} has no analytic Hessian')

    def stochastic_gradient(self, theta, noise_seed):
        g = self.gradient(theta)
        if self.noise > 0.0:
            g = g + self.noise * np.random.default_rng(noise_seed).standard_normal(self.dim)
        return g

    def initial_point(self, seed=0):
        return np.zeros(self.dim)

    @property
    def ground_truth(self) -> Optional[GroundTruth]:
        return None

    @property
    def objective_floor(self) -> Optional[float]:
        return None

    def _theta(self, theta):
        return as_vector(theta, self.dim, name='theta')

    def __repr__(self):
        return f'{type(self).__name__}(D={self.dim}, noise={self.noise})'


class Quadratic(StochasticProblem):
    """f(θ) = ½·(θ − p)ᵀ·H·(θ − p)"""
    kind = 'quadratic'

    def __init__(self, hessian, center=None, noise=0.0):
        H = np.asarray(hessian, dtype=np.float64)
        if H.ndim != 2 or H.shape[0] != H.shape[1] or H.shape[0] == 0:
            raise ConfigurationError(f'must be a non-empty square matrix, got shape {H.shape}', key='hessian')
        if not np.all(np.isfinite(H)):
            raise ConfigurationError('entries must be finite', key='hessian')
        if np.max(np.abs(H - H.T)) > 1e-10 * max(1.0, np.max(np.abs(H))):
            raise ConfigurationError('must be symmetric', key='hessian')
        super().__init__(H.shape[0], noise)
        self.H = 0.5 * (H + H.T)
        if center is None:
            center = np.zeros(self.dim)
        center = np.asarray(center, dtype=np.float64)
        if center.shape != (self.dim,):
            raise ConfigurationError(f'must have length {self.dim}, got shape {center.shape}', key='center')
        self.center = center
        self._min_eigenvalue = float(np.linalg.eigvalsh(self.H)[0])

    @classmethod
    def random(cls, dim, condition=10.0, min_eigenvalue=1.0, seed=0, noise=0.0, center=None):
        """
        SPD Hessian with eigenvalues log-spaced in
        [min_eigenvalue, min_eigenvalue·condition] in a random orthogonal
        frame; a random center unless one is given.
        """
        if condition < 1.0:
            raise ConfigurationError(f'must be at least 1, got {condition}', key='condition')
        if min_eigenvalue <= 0.0:
            raise ConfigurationError(f'must be positive, got {min_eigenvalue}', key='min_eigenvalue')
        rng = np.random.default_rng(seed)
        Q, R = np.linalg.qr(rng.standard_normal((dim, dim)))
        Q = Q * np.where(np.diag(R) < 0.0, -1.0, 1.0)
        eigenvalues = min_eigenvalue * np.logspace(0.0, np.log10(condition), dim)
        H = (Q * eigenvalues) @ Q.T
        if center is None:
            center = rng.standard_normal(dim)
        return cls(0.5 * (H + H.T), center, noise)

    def objective(self, theta):
        x = self._theta(theta) - self.center
        return 0.5 * float(x @ self.H @ x)

    def gradient(self, theta):
        return self.H @ (self._theta(theta) - self.center)

    def hessian(self, theta):
        return self.H.copy()

    def initial_point(self, seed=0):
        return self.center + np.random.default_rng(seed).standard_normal(self.dim)

    @property
    def ground_truth(self):
        return GroundTruth(hessian=self.H.copy(), stationary_point=self.center.copy())

    @property
    def objective_floor(self):
        return 0.0 if self._min_eigenvalue >= 0.0 else None


class Saddle(StochasticProblem):
    """
    f(θ) = ½·Σ λᵢ·xᵢ² + (q/4)·Σ_{λᵢ<0} xᵢ⁴ with x = θ − center.

    The quartic term bounds the negative-curvature axes from below; with
    q = 0 the landscape is the pure quadratic saddle.
    """
    kind = 'saddle'

    def __init__(self, curvatures=(1.0, -1.0), center=None, quartic=0.25, noise=0.0):
        lambdas = np.asarray(curvatures, dtype=np.float64)
        if lambdas.ndim != 1 or lambdas.size == 0:
            raise ConfigurationError('must be a non-empty list', key='curvatures')
        if np.any(lambdas == 0.0) or not np.all(np.isfinite(lambdas)):
            raise ConfigurationError('curvatures must be finite and nonzero', key='curvatures')
        if quartic < 0.0:
            raise ConfigurationError(f'must be non-negative, got {quartic}', key='quartic')
        super().__init__(lambdas.size, noise)
        self.curvatures = lambdas
        self.quartic = float(quartic)
        self.negative = lambdas < 0.0
        if center is None:
            center = np.zeros(self.dim)
        center = np.asarray(center, dtype=np.float64)
        if center.shape != (self.dim,):
            raise ConfigurationError(f'must have length {self.dim}, got shape {center.shape}', key='center')
        self.center = center

    def objective(self, theta):
        x = self._theta(theta) - self.center
        quadratic = 0.5 * float(np.sum(self.curvatures * x * x))
        return quadratic + 0.25 * self.quartic * float(np.sum(x[self.negative] ** 4))

    def gradient(self, theta):
        x = self._theta(theta) - self.center
        return self.curvatures * x + self.quartic * np.where(self.negative, x ** 3, 0.0)

    def hessian(self, theta):
        x = self._theta(theta) - self.center
        return np.diag(self.curvatures + 3.0 * self.quartic * np.where(self.negative, x * x, 0.0))

    def initial_point(self, seed=0):
        return self.center + np.where(self.negative, 0.1, 1.0)

    @property
    def ground_truth(self):
        return GroundTruth(hessian=np.diag(self.curvatures), stationary_point=self.center.copy())

    @property
    def objective_floor(self):
        if not np.any(self.negative):
            return 0.0
        if self.quartic == 0.0:
            return None
        return -float(np.sum(self.curvatures[self.negative] ** 2)) / (4.0 * self.quartic)


class Rosenbrock(StochasticProblem):
    """f(θ) = Σᵢ b·(θᵢ₊₁ − θᵢ²)² + (a − θᵢ)² over consecutive pairs."""
    kind = 'rosenbrock'

    def __init__(self, dim=2, a=1.0, b=100.0, noise=0.0):
        if int(dim) < 2:
            raise ConfigurationError(f'must be at least 2, got {dim}', key='dim')
        if b <= 0.0:
            raise ConfigurationError(f'must be positive, got {b}', key='b')
        super().__init__(dim, noise)
        self.a = float(a)
        self.b = float(b)

    def objective(self, theta):
        x = self._theta(theta)
        head, tail = x[:-1], x[1:]
        return float(np.sum(self.b * (tail - head * head) ** 2 + (self.a - head) ** 2))

    def gradient(self, theta):
        x = self._theta(theta)
        head, tail = x[:-1], x[1:]
        link = tail - head * head
        g = np.zeros(self.dim)
        g[:-1] += -4.0 * self.b * head * link - 2.0 * (self.a - head)
        g[1:] += 2.0 * self.b * link
        return g

    def hessian(self, theta):
        x = self._theta(theta)
        head, tail = x[:-1], x[1:]
        H = np.zeros((self.dim, self.dim))
        index = np.arange(self.dim - 1)
        H[index, index] += 12.0 * self.b * head * head - 4.0 * self.b * tail + 2.0
        H[index + 1, index + 1] += 2.0 * self.b
        H[index, index + 1] = -4.0 * self.b * head
        H[index + 1, index] = -4.0 * self.b * head
        return H

    def minimizer(self):
        if self.dim == 2:
            return np.array([self.a, self.a * self.a])
        if self.a == 1.0:
            return np.ones(self.dim)
        return None

    def initial_point(self, seed=0):
        return np.where(np.arange(self.dim) % 2 == 0, -1.2, 1.0)

    @property
    def ground_truth(self):
        p = self.minimizer()
        if p is None:
            return None
        return GroundTruth(hessian=self.hessian(p), stationary_point=p)

    @property
    def objective_floor(self):
        return None if self.minimizer() is None else 0.0


class Plateau(StochasticProblem):
    """
    f(θ) = Σᵢ h·tanh²((θᵢ − c)/w)

    Each coordinate is a well of depth h and width w around c whose
    saturated tail is a near-flat shelf. The start sits ``start_offset``
    widths out; the shelf is every point whose per-coordinate offsets lie
    in [start_offset − ½, start_offset + 1] widths, and construction
    samples it to confirm ‖∇f‖ stays below the flat threshold there. The
    only stationary point is θ = c.
    """
    kind = 'plateau'

    def __init__(self, dim=10, height=1.0, width=1.0, center=0.0, start_offset=6.0, noise=0.0):
        super().__init__(dim, noise)
        if height <= 0.0:
            raise ConfigurationError(f'must be positive, got {height}', key='height')
        if width <= 0.0:
            raise ConfigurationError(f'must be positive, got {width}', key='width')
        if start_offset <= 1.0:
            raise ConfigurationError(f'must exceed 1 width, got {start_offset}', key='start_offset')
        self.height = float(height)
        self.width = float(width)
        self.center = float(center)
        self.start_offset = float(start_offset)
        self._check_shelf()

    def shelf_bounds(self):
        low = self.center + (self.start_offset - 0.5) * self.width
        high = self.center + (self.start_offset + 1.0) * self.width
        return low, high

    def _check_shelf(self):
        low, high = self.shelf_bounds()
        rng = np.random.default_rng(0)
        samples = rng.uniform(low, high, size=(SHELF_SAMPLES, self.dim))
        samples[0] = low
        worst = max(float(np.linalg.norm(self.gradient(x))) for x in samples)
        if worst >= FLAT_GRADIENT:
            raise ConfigurationError(
                f'shelf is not flat: gradient norm reaches {worst:.3e} '
                f'(needs < {FLAT_GRADIENT:g}); increase start_offset',
                key='start_offset',
            )

    def objective(self, theta):
        u = (self._theta(theta) - self.center) / self.width
        return self.height * float(np.sum(np.tanh(u) ** 2))

    def gradient(self, theta):
        u = (self._theta(theta) - self.center) / self.width
        t = np.tanh(u)
        return 2.0 * self.height / self.width * t * (1.0 - t * t)

    def hessian(self, theta):
        u = (self._theta(theta) - self.center) / self.width
        t = np.tanh(u)
        sech2 = 1.0 - t * t
        return np.diag(2.0 * self.height / self.width ** 2 * (sech2 * sech2 - 2.0 * t * t * sech2))

    def initial_point(self, seed=0):
        return np.full(self.dim, self.center + self.start_offset * self.width)

    @property
    def ground_truth(self):
        stationary = np.full(self.dim, self.center)
        return GroundTruth(hessian=self.hessian(stationary), stationary_point=stationary)

    @property
    def objective_floor(self):
        return 0.0


class MLP(StochasticProblem):
    """
    Two-layer tanh network on a fixed synthetic regression set.

    θ packs (W₁, b₁, W₂, b₂) row-major. The loss is ½·mean over samples of
    the squared output error. Targets come from a random network of the
    same shape plus Gaussian label noise. The data set is split once into
    equal minibatches; the oracle draws one minibatch per noise seed.
    """
    kind = 'mlp'
    MAX_HIDDEN = 64

    def __init__(self, n_inputs=8, n_hidden=16, n_outputs=1, n_samples=256, batch_size=32,
                 data_seed=0, init_scale=1.0, label_noise=0.1):
        sizes = dict(n_inputs=n_inputs, n_hidden=n_hidden, n_outputs=n_outputs,
                     n_samples=n_samples, batch_size=batch_size)
        for key, value in sizes.items():
            if int(value) < 1:
                raise ConfigurationError(f'must be a positive integer, got {value}', key=key)
        if n_hidden > self.MAX_HIDDEN:
            raise ConfigurationError(f'must be at most {self.MAX_HIDDEN}, got {n_hidden}', key='n_hidden')
        if n_samples % batch_size:
            raise ConfigurationError(
                f'must divide n_samples={n_samples}, got {batch_size}', key='batch_size',
            )
        if init_scale <= 0.0:
            raise ConfigurationError(f'must be positive, got {init_scale}', key='init_scale')
        if label_noise < 0.0:
            raise ConfigurationError(f'must be non-negative, got {label_noise}', key='label_noise')

        self.n_inputs = int(n_inputs)
        self.n_hidden = int(n_hidden)
        self.n_outputs = int(n_outputs)
        self.init_scale = float(init_scale)
        self.shapes = [
            (self.n_hidden, self.n_inputs),
            (self.n_hidden,),
            (self.n_outputs, self.n_hidden),
            (self.n_outputs,),
        ]
        super().__init__(sum(int(np.prod(shape)) for shape in self.shapes), 0.0)

        rng = np.random.default_rng(data_seed)
        self.X = rng.standard_normal((n_samples, self.n_inputs))
        W1 = rng.standard_normal((self.n_hidden, self.n_inputs)) / np.sqrt(self.n_inputs)
        b1 = 0.1 * rng.standard_normal(self.n_hidden)
        W2 = rng.standard_normal((self.n_outputs, self.n_hidden)) / np.sqrt(self.n_hidden)
        self.Y = np.tanh(self.X @ W1.T + b1) @ W2.T + label_noise * rng.standard_normal((n_samples, self.n_outputs))
        self.batches = rng.permutation(n_samples).reshape(n_samples // batch_size, batch_size)

    @property
    def n_batches(self):
        return self.batches.shape[0]

    def unpack(self, theta):
        theta = self._theta(theta)
        parts = []
        offset = 0
        for shape in self.shapes:
            size = int(np.prod(shape))
            parts.append(theta[offset:offset + size].reshape(shape))
            offset += size
        return parts

    def _loss_and_gradient(self, theta, rows):
        W1, b1, W2, b2 = self.unpack(theta)
        X, Y = self.X[rows], self.Y[rows]
        hidden = np.tanh(X @ W1.T + b1)
        error = hidden @ W2.T + b2 - Y
        loss = 0.5 * float(np.sum(error * error)) / X.shape[0]

        d_out = error / X.shape[0]
        d_hidden = (d_out @ W2) * (1.0 - hidden * hidden)
        grads = [d_hidden.T @ X, d_hidden.sum(axis=0), d_out.T @ hidden, d_out.sum(axis=0)]
        return loss, np.concatenate([grad.ravel() for grad in grads])

    def objective(self, theta):
        return self._loss_and_gradient(theta, slice(None))[0]

    def gradient(self, theta):
        return self._loss_and_gradient(theta, slice(None))[1]

    def batch_gradient(self, theta, batch):
        return self._loss_and_gradient(theta, self.batches[batch])[1]

    def stochastic_gradient(self, theta, noise_seed):
        batch = int(np.random.default_rng(noise_seed).integers(self.n_batches))
        return self.batch_gradient(theta, batch)

    def initial_point(self, seed=0):
        rng = np.random.default_rng(seed)
        W1 = self.init_scale * rng.standard_normal(self.shapes[0]) / np.sqrt(self.n_inputs)
        W2 = self.init_scale * rng.standard_normal(self.shapes[2]) / np.sqrt(self.n_hidden)
        return np.concatenate([W1.ravel(), np.zeros(self.n_hidden), W2.ravel(), np.zeros(self.n_outputs)])

    def __repr__(self):
        return (f'MLP(D={self.dim}, layers={self.n_inputs}-{self.n_hidden}-{self.n_outputs}, '
                f'batches={self.n_batches})')
