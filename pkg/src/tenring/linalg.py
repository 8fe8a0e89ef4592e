"""Dense matrix factorizations and solves backing the ALS sweeps.

Everything here works on plain float64 ndarrays.  All right-hand solves use
the row-vector orientation ``Z @ A = B`` so that the block subproblem shapes
carry through without transposition gymnastics.
"""

import numpy as np
import scipy.linalg

__all__ = [
    "DegenerateTriangularError",
    "qr_economy",
    "spd_solve",
    "tri_solve_right",
    "svd_solve_right",
]

TRI_FLOOR_SCALE = 1e-13
SVD_RCOND_DEFAULT = 1e-12


class DegenerateTriangularError(np.linalg.LinAlgError):
    """A triangular solve hit a diagonal entry below the degeneracy floor."""

    def __init__(self, index, value, floor):
        self.index = int(index)
        self.value = float(value)
        self.floor = float(floor)
        super().__init__(
            f"triangular factor diagonal {value:.3e} at index {index} is below "
            f"the degeneracy floor {floor:.3e}"
        )


def qr_economy(a):
    """Economy QR factorization with a deterministic sign convention.

    Returns ``(q, r)`` with ``q`` of shape ``(m, k)``, ``r`` of shape
    ``(k, n)``, ``k = min(m, n)``, ``q.T @ q = I`` and ``q @ r = a``.  Signs
    are fixed so the diagonal of ``r`` is nonnegative, making the
    factorization a function of the input bytes alone.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.size == 0:
        raise ValueError("qr_economy expects a nonempty matrix")
    q, r = np.linalg.qr(a, mode="reduced")
    signs = np.sign(np.diagonal(r)).copy()
    signs[signs == 0] = 1.0
    q = q * signs
    r = r * signs[:, None]
    return q, r


def spd_solve(s, rhs):
    """Solve ``z @ s = rhs`` for a symmetric positive definite ``s``.

    Uses a Cholesky factorization; if that fails (``s`` numerically
    indefinite or singular), falls back to a column-pivoted least-squares
    solve instead of aborting.

    Returns ``(z, used_fallback)``.
    """
    s = np.asarray(s, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {s.shape}")
    if rhs.shape[-1] != s.shape[0]:
        raise ValueError(f"rhs with {rhs.shape[-1]} columns does not match {s.shape}")
    scale = np.max(np.abs(s)) if s.size else 0.0
    if scale > 0 and np.max(np.abs(s - s.T)) > 1e-8 * scale:
        raise ValueError("matrix is not symmetric within 1e-8 relative")
    sym = 0.5 * (s + s.T)
    try:
        cf = scipy.linalg.cho_factor(sym, lower=False, check_finite=False)
        z = scipy.linalg.cho_solve(cf, rhs.T, check_finite=False).T
        return z, False
    except (scipy.linalg.LinAlgError, np.linalg.LinAlgError):
        z, *_ = scipy.linalg.lstsq(sym, rhs.T, lapack_driver="gelsy",
                                   check_finite=False)
        return z.T, True


def tri_solve_right(r, rhs, floor_scale=TRI_FLOOR_SCALE):
    """Solve ``z @ r.T = rhs`` by back-substitution, ``r`` upper triangular.

    Raises :class:`DegenerateTriangularError` when a diagonal entry of ``r``
    falls below ``floor_scale * max|r|``; callers may then switch to
    :func:`svd_solve_right`.
    """
    r = np.asarray(r, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise ValueError(f"expected a square triangular matrix, got shape {r.shape}")
    diag = np.abs(np.diagonal(r))
    floor = floor_scale * (np.max(np.abs(r)) if r.size else 0.0)
    worst = int(np.argmin(diag))
    if diag[worst] <= floor:
        raise DegenerateTriangularError(worst, diag[worst], floor)
    z = scipy.linalg.solve_triangular(r, rhs.T, lower=False, check_finite=False)
    return z.T


def svd_solve_right(r, rhs, rcond=SVD_RCOND_DEFAULT):
    """Minimum-norm least-squares solution of ``z @ r.T = rhs``.

    Singular values of ``r`` at or below ``rcond * sigma_max`` are truncated,
    so the solve stays defined for rank-deficient and rectangular ``r``.
    """
    r = np.asarray(r, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    return rhs @ np.linalg.pinv(r, rcond=rcond).T
