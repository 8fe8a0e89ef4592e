"""Synthetic test tensors: Gaussian, congruence-controlled and heavy-tailed
core generators plus the relative-noise model.

The conditioning of the ALS block subproblems is steered through the true
cores.  ``congruent`` cores come from matrices whose unit-norm columns share
a common pairwise inner product ``gamma``; ``student_t`` cores come from
correlated multivariate-t draws with an AR(1) correlation profile.  Both
reshape an ``I x R^2`` matrix into an ``(R, I, R)`` core: the matrix rows
become the lateral mode and each column index splits into the bond pair
(left bond fastest), i.e. the matrix is the core's classical 2-unfolding.
"""

import math
from dataclasses import dataclass

import numpy as np

from .linalg import qr_economy
from .ring import reconstruct
from .tensor_ops import classical_fold, norm
from .utils import make_rng, spawn_seeds
from .validation import check_element_budget

__all__ = [
    "CORE_KINDS",
    "SynthSpec",
    "gaussian_cores",
    "congruent_matrix",
    "congruent_cores",
    "student_t_matrix",
    "student_t_cores",
    "add_noise",
    "make_dataset",
]

CORE_KINDS = ("gaussian", "congruent", "student_t")


@dataclass
class SynthSpec:
    """Recipe for one synthetic tensor.

    ``order`` cubic modes of size ``dim``, true bond dimension ``rank``,
    core generator ``kind``, relative noise level ``noise``.  ``gamma`` is
    the common column inner product for ``congruent`` cores; ``theta`` and
    ``dof`` parameterize the ``student_t`` correlation profile
    ``theta**|i-j|`` and degrees of freedom.  ``seed`` may be an int or a
    tuple of ints.
    """

    order: int = 3
    dim: int = 100
    rank: int = 5
    kind: str = "gaussian"
    noise: float = 0.0
    gamma: float = 0.5
    theta: float = 0.5
    dof: int = 1
    seed: object = None

    def validate(self):
        if self.order < 2:
            raise ValueError("order must be at least 2")
        if self.dim < 1 or self.rank < 1:
            raise ValueError("dim and rank must be positive")
        if self.kind not in CORE_KINDS:
            raise ValueError(f"unknown core kind {self.kind!r}; expected {CORE_KINDS}")
        if self.noise < 0:
            raise ValueError("noise must be nonnegative")
        if self.kind == "congruent" and not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")
        if self.kind == "student_t":
            if not 0.0 <= self.theta < 1.0:
                raise ValueError("theta must lie in [0, 1)")
            if self.dof < 1:
                raise ValueError("dof must be at least 1")
        if self.kind in ("congruent", "student_t") and self.dim < self.rank**2:
            raise ValueError(
                f"matrix-based cores need dim >= rank^2 ({self.dim} < {self.rank**2})"
            )
        return self


def gaussian_cores(spec, rng=None):
    """Independent standard-normal cores of shape ``(rank, dim, rank)``."""
    spec.validate()
    rng = rng if rng is not None else make_rng(spec.seed)
    return [
        rng.standard_normal((spec.rank, spec.dim, spec.rank))
        for _ in range(spec.order)
    ]


def congruent_matrix(rows, cols, gamma, rng):
    """Matrix with unit-norm columns that all share inner product ``gamma``.

    Built as ``Q @ C`` with ``Q`` a random orthonormal basis and ``C`` the
    symmetric square root of the target Gram ``(1 - gamma) I + gamma J``, so
    the Gram holds by construction for any ``gamma`` in ``[0, 1)``.
    """
    if not 0.0 <= gamma < 1.0:
        raise ValueError("gamma must lie in [0, 1)")
    if rows < cols:
        raise ValueError(f"need rows >= cols for orthonormal columns ({rows} < {cols})")
    q, _ = qr_economy(rng.standard_normal((rows, cols)))
    a = math.sqrt(1.0 - gamma)
    b = (math.sqrt(1.0 - gamma + cols * gamma) - a) / cols
    c = a * np.eye(cols) + b * np.ones((cols, cols))
    return q @ c


def _matrix_cores(matrices, rank):
    return [classical_fold(m, 1, (rank, m.shape[0], rank)) for m in matrices]


def congruent_cores(spec, rng=None):
    """Cores reshaped from congruence-``gamma`` matrices of shape
    ``(dim, rank^2)``."""
    spec.validate()
    if spec.kind != "congruent":
        raise ValueError(f"spec kind is {spec.kind!r}, expected 'congruent'")
    rng = rng if rng is not None else make_rng(spec.seed)
    mats = [
        congruent_matrix(spec.dim, spec.rank**2, spec.gamma, rng)
        for _ in range(spec.order)
    ]
    return _matrix_cores(mats, spec.rank)


def student_t_matrix(rows, cols, theta, dof, rng):
    """Rows are independent multivariate-t draws with correlation
    ``theta**|i-j|`` and ``dof`` degrees of freedom.

    A t draw is a correlated Gaussian divided by ``sqrt(chi2_dof / dof)``.
    """
    if not 0.0 <= theta < 1.0:
        raise ValueError("theta must lie in [0, 1)")
    idx = np.arange(cols)
    corr = theta ** np.abs(np.subtract.outer(idx, idx))
    chol = np.linalg.cholesky(corr)
    gauss = rng.standard_normal((rows, cols)) @ chol.T
    scale = np.sqrt(rng.chisquare(dof, size=rows) / dof)
    return gauss / scale[:, None]


def student_t_cores(spec, rng=None):
    """Cores reshaped from correlated multivariate-t matrices of shape
    ``(dim, rank^2)``."""
    spec.validate()
    if spec.kind != "student_t":
        raise ValueError(f"spec kind is {spec.kind!r}, expected 'student_t'")
    rng = rng if rng is not None else make_rng(spec.seed)
    mats = [
        student_t_matrix(spec.dim, spec.rank**2, spec.theta, spec.dof, rng)
        for _ in range(spec.order)
    ]
    return _matrix_cores(mats, spec.rank)


_CORE_GENERATORS = {
    "gaussian": gaussian_cores,
    "congruent": congruent_cores,
    "student_t": student_t_cores,
}


def add_noise(x_true, eta, seed=None, rng=None):
    """Perturb ``x_true`` by Gaussian noise of exact relative size ``eta``.

        x = x_true + eta * (||x_true|| / ||n||) * n,   n ~ N(0, 1) i.i.d.

    The scaling makes ``||x - x_true|| / ||x_true||`` equal ``eta`` by
    construction.  ``eta = 0`` returns ``x_true`` unchanged.
    """
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    if eta == 0.0:
        return x_true
    rng = rng if rng is not None else make_rng(seed)
    draw = rng.standard_normal(x_true.shape)
    return x_true + eta * (norm(x_true) / norm(draw)) * draw


def make_dataset(spec, budget=None):
    """Generate ``(observed, true_cores)`` for a spec.

    Core generation and the noise draw use independent child streams of
    ``spec.seed``, so the observed tensor is reproducible and the noise is
    fresh for every distinct seed.
    """
    spec.validate()
    check_element_budget([spec.dim] * spec.order, budget)
    core_seed, noise_seed = spawn_seeds(spec.seed, 2)
    cores = _CORE_GENERATORS[spec.kind](spec, rng=make_rng(core_seed))
    x_true = reconstruct(cores, budget=budget)
    observed = add_noise(x_true, spec.noise, rng=make_rng(noise_seed))
    return observed, cores
