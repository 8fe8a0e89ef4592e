"""Scikit-learn style estimator wrapping the ALS solvers."""

import numbers

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .ring import reconstruct
from .solvers import VARIANTS, AlsConfig, decompose, exact_relative_error
from .validation import check_dense_tensor, check_ranks

__all__ = ["TensorRingALS"]


class TensorRingALS(BaseEstimator):
    """Tensor-ring decomposition fitted by alternating least squares.

    Learns third-order cores ``cores_[n]`` of shape
    ``(rank[n], X.shape[n], rank[n+1])`` (bonds cyclic) minimizing the
    Frobenius distance to ``X``.

    Parameters
    ----------
    rank : int or sequence of int, default=5
        Bond dimensions; an int is broadcast to every mode.
    variant : {'als', 'ne', 'qr', 'qrne'}, default='qrne'
        Solver. 'ne' is the fastest on well-conditioned data, 'qr' the most
        robust on ill-conditioned data, 'qrne' balances the two, 'als' is
        the plain reference solver.
    max_iter : int, default=20
        Number of full sweeps.
    tol : float, default=0.0
        Early stop when the tracked error changes less than this between
        sweeps; 0 runs all ``max_iter`` sweeps.
    error_mode : {'exact', 'cheap', 'none'}, default='exact'
        Per-sweep error tracking strategy; 'cheap' avoids dense
        reconstructions on large inputs.
    random_state : int, tuple of int, or None, default=None
        Seed for the Gaussian core initialization.
    rank_deficient_fallback : bool, default=True
        Recover from degenerate triangular solves with a truncated-SVD
        minimum-norm solve instead of raising.
    element_budget : int or None, default=None
        Override the dense-reconstruction element guard.

    Attributes
    ----------
    cores_ : list of ndarray
        Fitted cores.
    errors_ : list of float
        Relative error after each sweep (empty if ``error_mode='none'``).
    n_iter_ : int
        Sweeps actually run.
    report_ : AlsReport
        Full per-sweep diagnostics (timings, fallbacks, termination).

    Examples
    --------
    >>> import numpy as np
    >>> from tenring import TensorRingALS
    >>> rng = np.random.default_rng(0)
    >>> X = rng.normal(size=(8, 8, 8))
    >>> tr = TensorRingALS(rank=3, variant="ne", random_state=0).fit(X)
    >>> len(tr.cores_)
    3
    """

    def __init__(self, rank=5, variant="qrne", max_iter=20, tol=0.0,
                 error_mode="exact", random_state=None,
                 rank_deficient_fallback=True, element_budget=None):
        self.rank = rank
        self.variant = variant
        self.max_iter = max_iter
        self.tol = tol
        self.error_mode = error_mode
        self.random_state = random_state
        self.rank_deficient_fallback = rank_deficient_fallback
        self.element_budget = element_budget

    def _ranks_for(self, order):
        if isinstance(self.rank, numbers.Integral):
            return [int(self.rank)] * order
        return check_ranks(self.rank, order)

    def fit(self, X, y=None, init_cores=None):
        """Fit the decomposition to a dense tensor of order >= 2.

        ``init_cores`` optionally replaces the random initialization (used
        for warm starts and for comparing solver variants pairwise).
        """
        X = check_dense_tensor(X, min_order=2)
        if self.variant not in VARIANTS:
            raise ValueError(
                f"unknown variant {self.variant!r}; expected one of {VARIANTS}"
            )
        config = AlsConfig(
            ranks=self._ranks_for(X.ndim),
            max_iters=self.max_iter,
            tol=self.tol,
            seed=self.random_state,
            error_mode=self.error_mode,
            rank_deficient_fallback=self.rank_deficient_fallback,
            init_cores=init_cores,
            element_budget=self.element_budget,
        )
        self.cores_, self.report_ = decompose(X, self.variant, config)
        self.errors_ = self.report_.errors
        self.n_iter_ = self.report_.n_iters
        self.dims_ = X.shape
        return self

    def _check_fitted(self):
        if not hasattr(self, "cores_"):
            raise NotFittedError(
                "this TensorRingALS instance is not fitted yet; call fit first"
            )

    def reconstruct(self):
        """Materialize the fitted low-rank tensor."""
        self._check_fitted()
        return reconstruct(self.cores_, budget=self.element_budget)

    def score(self, X, y=None):
        """Negative relative reconstruction error (greater is better)."""
        self._check_fitted()
        X = check_dense_tensor(X, min_order=2)
        if X.shape != tuple(self.dims_):
            raise ValueError(f"X has shape {X.shape}, fitted on {tuple(self.dims_)}")
        return -exact_relative_error(X, self.cores_, budget=self.element_budget)
