"""Alternating least squares solvers for tensor-ring decomposition.

Four variants share the same block subproblem

    min_Z || A @ Z.T - X_cyc(n).T ||_F,    A = cyclic 2-unfolding of the
                                               merged subchain skipping n,

and differ only in how they solve it:

``als``
    Reference solver: materialize ``A``, economy-QR it, back-substitute.
``ne``
    Normal equations.  ``A.T @ A`` is assembled from cached per-core bond
    Grams (never from ``A``), and the dominant work is the single product
    ``X_cyc(n) @ A``.
``qr``
    Orthogonalized solver.  Each core carries a lateral QR factorization;
    the orthonormal factors compress the data tensor once per subproblem and
    the solve reduces to a small triangular system.
``qrne``
    Normal equations applied to the compressed subproblem of ``qr``,
    trading its inner QR for Gram bookkeeping on the triangular factors.

All four are mathematically equivalent block minimizers, so with a common
initialization their per-sweep error sequences coincide up to rounding; they
differ in speed and in numerical robustness on ill-conditioned data.
"""

import math
from dataclasses import dataclass, field
from time import perf_counter

import numpy as np

from . import linalg, ring
from .tensor_ops import classical_fold, classical_unfold, cyclic_unfold, multi_ttm, norm
from .utils import make_rng, stopwatch
from .validation import check_dense_tensor, check_element_budget, check_ranks

__all__ = [
    "VARIANTS",
    "AlsConfig",
    "AlsReport",
    "SweepCache",
    "StaleCacheError",
    "tr_als",
    "tr_als_ne",
    "tr_als_qr",
    "tr_als_qrne",
    "decompose",
    "exact_relative_error",
    "cheap_relative_error",
]

VARIANTS = ("als", "ne", "qr", "qrne")
ERROR_MODES = ("exact", "cheap", "none")
BUCKETS = ("subchain", "mttsp", "solve", "gramqr", "other")


@dataclass
class AlsConfig:
    """Settings shared by all solver variants.

    ranks
        Target bond dimensions, one per mode (cyclic: ``ranks[n]`` is the
        left bond of core ``n``).
    max_iters
        Number of full sweeps; the default termination rule is
        max-iterations only.
    tol
        Optional early stop: quit once the tracked relative error changes by
        less than ``tol`` between sweeps.  0 disables (default).
    seed
        Seed for the Gaussian core initialization (ignored when
        ``init_cores`` is given).
    error_mode
        ``exact`` reconstructs the tensor each sweep, ``cheap`` reuses sweep
        intermediates (see :func:`cheap_relative_error`), ``none`` skips
        tracking.
    rank_deficient_fallback
        When a triangular solve degenerates, retry with a truncated-SVD
        minimum-norm solve instead of raising.
    init_cores
        Optional explicit initialization (copied, not mutated).
    element_budget
        Override for the dense reconstruction guard.
    svd_rcond
        Truncation threshold for the SVD fallback solves.
    debug_checks
        Assert the internal consistency identities every sweep (coefficient
        Gram vs. explicitly assembled subchain, orthonormal-factor
        reconstruction).  For tests and small problems only.
    """

    ranks: tuple
    max_iters: int = 20
    tol: float = 0.0
    seed: object = None
    error_mode: str = "exact"
    rank_deficient_fallback: bool = True
    init_cores: list = None
    element_budget: int = None
    svd_rcond: float = linalg.SVD_RCOND_DEFAULT
    debug_checks: bool = False


@dataclass
class AlsReport:
    """Per-run diagnostics: tracked errors, timings and solver events.

    ``errors[k]`` is the relative error after sweep ``k`` (empty when
    tracking is off).  ``iter_seconds`` and ``iter_buckets`` cover solver
    work only; error evaluation time is excluded so timing comparisons are
    not skewed by instrumentation.  Buckets: ``subchain`` (chain merges),
    ``mttsp`` (data-times-coefficient products, including the compressions),
    ``solve``, ``gramqr`` (Gram/QR maintenance), ``other``.
    """

    variant: str
    errors: list = field(default_factory=list)
    iter_seconds: list = field(default_factory=list)
    iter_buckets: list = field(default_factory=list)
    upfront_seconds: dict = field(default_factory=dict)
    termination: str = ""
    fallback_count: int = 0

    @property
    def n_iters(self):
        return len(self.iter_seconds)

    @property
    def final_error(self):
        return self.errors[-1] if self.errors else None


class StaleCacheError(RuntimeError):
    """Cheap error requested from a cache that is not end-of-sweep fresh."""


@dataclass
class SweepCache:
    """End-of-sweep intermediates backing :func:`cheap_relative_error`.

    Only the fields used by the variant are set.  ``fresh`` is flipped on by
    the solver after the last block update of a sweep and must be checked
    before use: mid-sweep quantities mix core generations and do not satisfy
    the estimator identities.
    """

    variant: str
    x_norm: float
    fresh: bool = False
    core_mat: np.ndarray = None      # updated last core, classical 2-unfolding
    m_last: np.ndarray = None        # als/ne/qrne: data-times-coefficient product

    s_last: np.ndarray = None        # ne/qrne: coefficient Gram matrix
    w_last: np.ndarray = None        # qr: compressed data block
    r0_last: np.ndarray = None       # qr: triangular factor of the subchain
    r_core_mat: np.ndarray = None    # qr/qrne: triangular factor of updated core
    c_last: np.ndarray = None        # als: q.T @ X_cyc(n).T from the block QR
    r_a_last: np.ndarray = None      # als: triangular factor of the block QR


def exact_relative_error(x, cores, budget=None):
    """``||x - dense(cores)|| / ||x||`` via full reconstruction.

    A zero input defines the relative error as 0.  Refuses tensors over the
    element budget.
    """
    x = np.asarray(x)
    nx = norm(x)
    if nx == 0.0:
        return 0.0
    return norm(x - ring.reconstruct(cores, budget=budget)) / nx


def cheap_relative_error(cache):
    """Relative error from sweep intermediates, no reconstruction.

    Expands ``||x - m||^2 = ||x||^2 - 2 <x, m> + ||m||^2`` where both the
    cross term and the model norm come from quantities the sweep already
    computed (valid only right after a full sweep; enforced via
    ``cache.fresh``).  The difference can round slightly negative near an
    exact fit, so it is clamped at 0.
    """
    if not isinstance(cache, SweepCache):
        raise TypeError("cheap_relative_error expects a SweepCache")
    if not cache.fresh:
        raise StaleCacheError(
            "cheap error is only defined at the end of a full sweep"
        )
    if cache.x_norm == 0.0:
        return 0.0
    g = cache.core_mat
    if cache.variant == "ne":
        cross = float(np.vdot(cache.m_last, g))
        model = float(np.vdot(cache.s_last, g.T @ g))
    elif cache.variant == "qr":
        cross = float(np.vdot(cache.w_last, g @ cache.r0_last.T))
        model = float(np.vdot(cache.r0_last.T @ cache.r0_last,
                              cache.r_core_mat.T @ cache.r_core_mat))
    elif cache.variant == "qrne":
        cross = float(np.vdot(cache.m_last, g))
        model = float(np.vdot(cache.s_last,
                              cache.r_core_mat.T @ cache.r_core_mat))
    elif cache.variant == "als":
        cross = float(np.vdot(cache.c_last, cache.r_a_last @ g.T))
        model = float(np.vdot(cache.r_a_last.T @ cache.r_a_last, g.T @ g))
    else:
        raise ValueError(f"unknown variant {cache.variant!r}")
    sq = cache.x_norm**2 - 2.0 * cross + model
    return math.sqrt(max(0.0, sq)) / cache.x_norm


def _assert_close(actual, desired, rel=1e-10):
    """Debug-mode identity check with a scale-aware absolute tolerance."""
    scale = max(1.0, float(np.max(np.abs(desired))))
    np.testing.assert_allclose(actual, desired, rtol=rel, atol=rel * scale)


class _Run:
    """Shared sweep scaffolding: setup, error tracking, termination."""

    def __init__(self, x, config, variant):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
        if config.error_mode not in ERROR_MODES:
            raise ValueError(
                f"unknown error_mode {config.error_mode!r}; expected one of {ERROR_MODES}"
            )
        if config.tol > 0 and config.error_mode == "none":
            raise ValueError("tol-based termination needs error tracking enabled")
        if config.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        self.x = check_dense_tensor(x, min_order=2)
        self.config = config
        self.variant = variant
        self.dims = self.x.shape
        self.n_modes = self.x.ndim
        self.ranks = check_ranks(config.ranks, self.n_modes)
        if config.error_mode == "exact":
            check_element_budget(self.dims, config.element_budget)
        self.x_norm = norm(self.x)
        self.report = AlsReport(variant=variant)
        self.cache = SweepCache(variant=variant, x_norm=self.x_norm)
        self.buckets = None

    def init_cores(self):
        cfg = self.config
        if cfg.init_cores is not None:
            cores = ring.validate_cores(cfg.init_cores, dims=self.dims)
            got = ring.core_ranks(cores)
            if got != tuple(self.ranks):
                raise ValueError(f"init cores have ranks {got}, expected {tuple(self.ranks)}")
            return [g.copy() for g in cores]
        rng = make_rng(cfg.seed)
        return ring.random_cores(self.dims, self.ranks, rng)

    def core_shape(self, n):
        return (self.ranks[n], self.dims[n], self.ranks[(n + 1) % self.n_modes])

    def solve_triangular_block(self, r, rhs):
        """Back-substitution with the configured rank-deficiency handling."""
        if r.shape[0] != r.shape[1]:
            # underdetermined block; minimum-norm is the only sensible answer
            return linalg.svd_solve_right(r, rhs, rcond=self.config.svd_rcond)
        try:
            return linalg.tri_solve_right(r, rhs)
        except linalg.DegenerateTriangularError:
            if not self.config.rank_deficient_fallback:
                raise
            self.report.fallback_count += 1
            return linalg.svd_solve_right(r, rhs, rcond=self.config.svd_rcond)

    def solve_normal_block(self, s, rhs):
        z, used_fallback = linalg.spd_solve(s, rhs)
        if used_fallback:
            self.report.fallback_count += 1
        return z

    def run(self, sweep, prepare=None):
        """Drive ``sweep(cores)`` until termination; returns (cores, report).

        ``prepare(cores)`` runs once before the first sweep and is timed as
        upfront work, outside the per-iteration clocks.
        """
        cfg = self.config
        report = self.report
        if self.x_norm == 0.0:
            report.termination = "zero_input"
            return ring.zero_cores(self.dims, self.ranks), report
        cores = self.init_cores()
        if prepare is not None:
            t0 = perf_counter()
            prepare(cores)
            self.upfront("gramqr", perf_counter() - t0)
        report.termination = "max_iters"
        for _ in range(cfg.max_iters):
            self.buckets = dict.fromkeys(BUCKETS, 0.0)
            t0 = perf_counter()
            sweep(cores)
            report.iter_seconds.append(perf_counter() - t0)
            report.iter_buckets.append(self.buckets)
            if cfg.error_mode == "exact":
                report.errors.append(
                    exact_relative_error(self.x, cores, budget=cfg.element_budget)
                )
            elif cfg.error_mode == "cheap":
                report.errors.append(cheap_relative_error(self.cache))
            self.cache.fresh = False
            if cfg.tol > 0 and len(report.errors) >= 2:
                if abs(report.errors[-2] - report.errors[-1]) < cfg.tol:
                    report.termination = "tol"
                    break
        return cores, report

    def upfront(self, key, seconds):
        self.report.upfront_seconds[key] = (
            self.report.upfront_seconds.get(key, 0.0) + seconds
        )


def tr_als(x, config):
    """Reference sweep: explicit subchain, QR least squares per block.

    Returns ``(cores, report)``.
    """
    run = _Run(x, config, "als")
    if run.x_norm == 0.0:
        return run.run(None)
    x_unf = [cyclic_unfold(run.x, n) for n in range(run.n_modes)]
    last = run.n_modes - 1

    def sweep(cores):
        for n in range(run.n_modes):
            with stopwatch(run.buckets, "subchain"):
                a = cyclic_unfold(ring.subchain_skip(cores, n), 1)
            with stopwatch(run.buckets, "solve"):
                q, r = linalg.qr_economy(a)
                c = q.T @ x_unf[n].T
                z = run.solve_triangular_block(r, c.T)
            cores[n] = classical_fold(z, 1, run.core_shape(n))
            if n == last:
                run.cache.c_last = c
                run.cache.r_a_last = r
                run.cache.core_mat = z
        run.cache.fresh = True

    return run.run(sweep)


def tr_als_ne(x, config):
    """Normal-equation sweep with cached bond Grams.

    Per block: compose the coefficient Gram from the cached per-core Grams,
    form the data-times-coefficient product, solve the normal equations, and
    refresh the Gram of the updated core.  Returns ``(cores, report)``.
    """
    run = _Run(x, config, "ne")
    if run.x_norm == 0.0:
        return run.run(None)
    x_unf = [cyclic_unfold(run.x, n) for n in range(run.n_modes)]
    last = run.n_modes - 1
    grams = []

    def prepare(cores):
        grams.extend(ring.lateral_gram(g) for g in cores)

    def sweep(cores):
        for n in range(run.n_modes):
            with stopwatch(run.buckets, "other"):
                order = ring.gram_chain_order(n, run.n_modes)
                s = ring.gram_chain(grams[j] for j in order)
            with stopwatch(run.buckets, "subchain"):
                a = cyclic_unfold(ring.subchain_skip(cores, n), 1)
            if run.config.debug_checks:
                _assert_close(s, a.T @ a)
            with stopwatch(run.buckets, "mttsp"):
                m = x_unf[n] @ a
            with stopwatch(run.buckets, "solve"):
                z = run.solve_normal_block(s, m)
            cores[n] = classical_fold(z, 1, run.core_shape(n))
            with stopwatch(run.buckets, "gramqr"):
                grams[n] = ring.lateral_gram(cores[n])
            if n == last:
                run.cache.m_last = m
                run.cache.s_last = s
                run.cache.core_mat = z
        run.cache.fresh = True

    return run.run(sweep, prepare)


def _kron_assembled_q(qrs, skip):
    """Orthonormal factor of the merged subchain, for debug checks only."""
    order = ring._skip_order(skip, len(qrs))
    out = qrs[order[-1]].q
    for j in reversed(order[:-1]):
        out = np.kron(out, qrs[j].q)
    return out


def tr_als_qr(x, config):
    """Orthogonalized sweep: per-core lateral QR, compressed triangular solve.

    Per block: merge the triangular factors of the other cores, QR that
    small subchain, compress the data tensor by the orthonormal factors, and
    back-substitute.  Returns ``(cores, report)``.
    """
    run = _Run(x, config, "qr")
    if run.x_norm == 0.0:
        return run.run(None)
    last = run.n_modes - 1
    qrs = []

    def prepare(cores):
        qrs.extend(ring.mode2_qr(g) for g in cores)

    def sweep(cores):
        for n in range(run.n_modes):
            with stopwatch(run.buckets, "subchain"):
                v = ring.subchain_skip([m.r_tensor for m in qrs], n)
            with stopwatch(run.buckets, "gramqr"):
                q0, r0 = linalg.qr_economy(cyclic_unfold(v, 1))
            with stopwatch(run.buckets, "mttsp"):
                y = multi_ttm(
                    run.x,
                    [(j, qrs[j].q.T) for j in range(run.n_modes) if j != n],
                )
            with stopwatch(run.buckets, "other"):
                w = cyclic_unfold(y, n) @ q0
            if run.config.debug_checks:
                full_q = _kron_assembled_q(qrs, n) @ q0
                a_ref = cyclic_unfold(ring.subchain_skip(cores, n), 1)
                np.testing.assert_allclose(
                    full_q.T @ full_q, np.eye(full_q.shape[1]), atol=1e-11
                )
                _assert_close(full_q @ r0, a_ref, rel=1e-9)
            with stopwatch(run.buckets, "solve"):
                z = run.solve_triangular_block(r0, w)
            cores[n] = classical_fold(z, 1, run.core_shape(n))
            with stopwatch(run.buckets, "gramqr"):
                qrs[n] = ring.mode2_qr(cores[n])
            if n == last:
                run.cache.w_last = w
                run.cache.r0_last = r0
                run.cache.core_mat = z
                run.cache.r_core_mat = qrs[n].r_matrix
        run.cache.fresh = True

    return run.run(sweep, prepare)


def tr_als_qrne(x, config):
    """Combined sweep: compress as in ``qr``, solve by normal equations.

    The coefficient Gram of the compressed subproblem comes from chained
    Grams of the triangular factors, skipping the inner QR that dominates
    ``qr``'s overhead.  Returns ``(cores, report)``.
    """
    run = _Run(x, config, "qrne")
    if run.x_norm == 0.0:
        return run.run(None)
    last = run.n_modes - 1
    qrs = []
    rgrams = []

    def prepare(cores):
        qrs.extend(ring.mode2_qr(g) for g in cores)
        rgrams.extend(ring.lateral_gram(m.r_tensor) for m in qrs)

    def sweep(cores):
        for n in range(run.n_modes):
            with stopwatch(run.buckets, "other"):
                order = ring.gram_chain_order(n, run.n_modes)
                s = ring.gram_chain(rgrams[j] for j in order)
            with stopwatch(run.buckets, "subchain"):
                v = ring.subchain_skip([m.r_tensor for m in qrs], n)
            with stopwatch(run.buckets, "mttsp"):
                y = multi_ttm(
                    run.x,
                    [(j, qrs[j].q.T) for j in range(run.n_modes) if j != n],
                )
                m = cyclic_unfold(y, n) @ cyclic_unfold(v, 1)
            if run.config.debug_checks:
                v_unf = cyclic_unfold(v, 1)
                _assert_close(s, v_unf.T @ v_unf)
            with stopwatch(run.buckets, "solve"):
                z = run.solve_normal_block(s, m)
            cores[n] = classical_fold(z, 1, run.core_shape(n))
            with stopwatch(run.buckets, "gramqr"):
                qrs[n] = ring.mode2_qr(cores[n])
                rgrams[n] = ring.lateral_gram(qrs[n].r_tensor)
            if n == last:
                run.cache.m_last = m
                run.cache.s_last = s
                run.cache.core_mat = z
                run.cache.r_core_mat = qrs[n].r_matrix
        run.cache.fresh = True

    return run.run(sweep, prepare)


_SOLVERS = {
    "als": tr_als,
    "ne": tr_als_ne,
    "qr": tr_als_qr,
    "qrne": tr_als_qrne,
}


def decompose(x, variant, config):
    """Run the named solver variant; returns ``(cores, report)``."""
    try:
        solver = _SOLVERS[variant]
    except KeyError:
        raise ValueError(
            f"unknown variant {variant!r}; expected one of {VARIANTS}"
        ) from None
    return solver(x, config)
