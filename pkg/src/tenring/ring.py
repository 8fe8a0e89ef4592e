"""Tensor-ring representation: cores, subchain products, bond Grams and the
cheap inner-product machinery.

A ring representation of an order-``N`` tensor is a list of ``N`` third-order
cores, core ``n`` of shape ``(R_n, I_n, R_{n+1})`` with ``R_N = R_0`` (ring
closure).  Entry ``(i_0, ..., i_{N-1})`` of the represented tensor is the
trace of the product of lateral slices ``G_0[:, i_0, :] @ ... @
G_{N-1}[:, i_{N-1}, :]``.

Bond-Gram axis convention
-------------------------
:func:`lateral_gram` of cores ``g`` (shape ``(R, I, R')``) and ``z`` (shape
``(S, I, S')``) returns ``P`` of shape ``(R', R, S', S)`` with

    P[a, b, c, d] = sum_i g[b, i, a] * z[d, i, c]

i.e. axes are (g-slice columns, g-slice rows, z-slice columns, z-slice rows)::

        a: R'  -- right bond of g        c: S'  -- right bond of z
        b: R   -- left bond of g         d: S   -- left bond of z

With this layout two Grams of neighbouring cores compose with
:func:`tenring.tensor_ops.contract_24_13`, contracting the shared bond pair
(axes 1, 3 of the left Gram against axes 0, 2 of the right one).
"""

import math
from dataclasses import dataclass

import numpy as np

from .linalg import qr_economy
from .tensor_ops import (
    classical_fold,
    classical_unfold,
    contract_24_13,
    cyclic_fold,
    cyclic_unfold,
    split_unfold,
    ttm,
)
from .validation import check_element_budget

__all__ = [
    "validate_cores",
    "core_ranks",
    "random_cores",
    "zero_cores",
    "subchain_merge",
    "subchain_skip",
    "reconstruct",
    "lateral_gram",
    "gram_chain_order",
    "gram_chain",
    "Mode2Qr",
    "mode2_qr",
    "tr_inner",
    "tr_norm",
]


def validate_cores(cores, dims=None):
    """Check ring structure: third-order cores with cyclically matching bonds.

    Returns the cores as a list of float64 arrays.  If ``dims`` is given the
    lateral sizes must match it.
    """
    cores = [np.asarray(g, dtype=np.float64) for g in cores]
    if len(cores) < 1:
        raise ValueError("a ring needs at least one core")
    for n, g in enumerate(cores):
        if g.ndim != 3:
            raise ValueError(f"core {n} has order {g.ndim}, expected 3")
        nxt = cores[(n + 1) % len(cores)]
        if g.shape[2] != nxt.shape[0]:
            raise ValueError(
                f"bond mismatch between core {n} (right bond {g.shape[2]}) and "
                f"core {(n + 1) % len(cores)} (left bond {nxt.shape[0]})"
            )
    if dims is not None:
        got = tuple(g.shape[1] for g in cores)
        if got != tuple(dims):
            raise ValueError(f"core lateral sizes {got} do not match dims {tuple(dims)}")
    return cores


def core_ranks(cores):
    """Bond dimensions ``(R_0, ..., R_{N-1})`` of a validated core list."""
    return tuple(g.shape[0] for g in cores)


def random_cores(dims, ranks, rng):
    """Standard-normal cores of shape ``(ranks[n], dims[n], ranks[n+1])``."""
    n_modes = len(dims)
    return [
        rng.standard_normal((ranks[n], dims[n], ranks[(n + 1) % n_modes]))
        for n in range(n_modes)
    ]


def zero_cores(dims, ranks):
    """All-zero cores of the requested geometry."""
    n_modes = len(dims)
    return [
        np.zeros((ranks[n], dims[n], ranks[(n + 1) % n_modes]))
        for n in range(n_modes)
    ]


def subchain_merge(a, b):
    """Merge two bond-compatible third-order tensors slice-wise.

    For ``a`` of shape ``(I, J1, K)`` and ``b`` of shape ``(K, J2, L)`` the
    result has shape ``(I, J1*J2, L)`` and its lateral slice at the combined
    index ``j1 + J1*j2`` (first factor fastest) is the matrix product
    ``a[:, j1, :] @ b[:, j2, :]``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 3 or b.ndim != 3:
        raise ValueError("subchain_merge expects two third-order tensors")
    if a.shape[2] != b.shape[0]:
        raise ValueError(
            f"bond mismatch: left tensor ends in {a.shape[2]}, right starts "
            f"with {b.shape[0]}"
        )
    ia, ja, k = a.shape
    _, jb, ib = b.shape
    prod = a.reshape(ia * ja, k) @ b.reshape(k, jb * ib)
    prod = prod.reshape(ia, ja, jb, ib).transpose(0, 2, 1, 3)
    return np.ascontiguousarray(prod).reshape(ia, jb * ja, ib)


def _skip_order(skip, n_modes):
    return list(range(skip + 1, n_modes)) + list(range(skip))


def subchain_skip(cores, skip):
    """Merge all cores except ``cores[skip]`` in ring order.

    The merge runs over modes ``skip+1, ..., N-1, 0, ..., skip-1`` left to
    right, producing a tensor of shape ``(R_{skip+1}, prod(I_j, j != skip),
    R_skip)`` whose lateral slices are the matrix products of the selected
    core slices.
    """
    if len(cores) < 2:
        raise ValueError("subchain_skip needs at least two cores")
    order = _skip_order(skip, len(cores))
    out = cores[order[0]]
    for j in order[1:]:
        out = subchain_merge(out, cores[j])
    return out


def reconstruct(cores, budget=None):
    """Materialize the dense tensor represented by the cores.

    Uses the unfolding identity ``X_cyc(0) = G0_(classical 2-unfold) @
    subchain_skip(cores, 0)_(cyclic 2-unfold).T`` rather than per-entry slice
    traces, which saves a factor of the bond dimension.  Refuses tensors
    larger than the element budget.
    """
    cores = validate_cores(cores)
    if len(cores) < 2:
        raise ValueError("reconstruct needs at least two cores")
    dims = tuple(g.shape[1] for g in cores)
    check_element_budget(dims, budget)
    rest = subchain_skip(cores, 0)
    mat = classical_unfold(cores[0], 1) @ cyclic_unfold(rest, 1).T
    return cyclic_fold(mat, 0, dims)


def lateral_gram(g, z=None):
    """Bond Gram of two cores sharing the lateral size.

    ``P[a, b, c, d] = sum_i g[b, i, a] * z[d, i, c]`` with the axis layout
    documented in the module docstring.  ``z=None`` gives the self-Gram,
    which is symmetric under swapping axis pairs (0, 1) <-> (2, 3).
    """
    g = np.asarray(g)
    z = g if z is None else np.asarray(z)
    if g.ndim != 3 or z.ndim != 3:
        raise ValueError("lateral_gram expects third-order tensors")
    if g.shape[1] != z.shape[1]:
        raise ValueError(
            f"lateral size mismatch: {g.shape[1]} vs {z.shape[1]}"
        )
    return np.einsum("bia,dic->abcd", g, z, optimize=True)


def gram_chain_order(skip, n_modes):
    """Gram composition order matching :func:`subchain_skip`.

    The merged subchain skipping mode ``n`` multiplies slices over modes
    ``n+1, ..., N-1, 0, ..., n-1``; its Gram composes from the per-core Grams
    in the reverse of that order: ``n-1, ..., 0, N-1, ..., n+1``.
    """
    return list(range(skip - 1, -1, -1)) + list(range(n_modes - 1, skip, -1))


def gram_chain(grams):
    """Compose bond Grams with :func:`contract_24_13` and flatten.

    Fed the self-Grams of the cores in :func:`gram_chain_order`, the result
    equals ``A.T @ A`` where ``A`` is the cyclic 2-unfolding of the merged
    subchain; rows and columns are indexed by bond pairs, left bond fastest.
    """
    grams = list(grams)
    if not grams:
        raise ValueError("gram_chain needs at least one Gram tensor")
    out = grams[0]
    for p in grams[1:]:
        out = contract_24_13(out, p)
    return split_unfold(out, 2)


@dataclass
class Mode2Qr:
    """Lateral-unfolding QR factorization of a third-order tensor.

    ``q`` has orthonormal columns and shape ``(I, k)`` with
    ``k = min(I, R*R')``; ``r_tensor`` has shape ``(R, k, R')`` and an upper
    triangular classical 2-unfolding.  The original tensor is
    ``ttm(r_tensor, q, 1)``.
    """

    r_tensor: np.ndarray
    q: np.ndarray

    @property
    def r_matrix(self):
        """Triangular factor as a ``(k, R*R')`` matrix, left bond fastest."""
        return classical_unfold(self.r_tensor, 1)


def mode2_qr(g):
    """QR-factorize a core along its lateral mode.

    Computes the economy QR of the classical 2-unfolding (``I x R*R'``) and
    folds the triangular factor back into a third-order tensor, covering both
    the tall (``I >= R*R'``) and wide (``I < R*R'``) cases.
    """
    g = np.asarray(g, dtype=np.float64)
    if g.ndim != 3:
        raise ValueError("mode2_qr expects a third-order tensor")
    r0, _, r1 = g.shape
    q, r = qr_economy(classical_unfold(g, 1))
    r_tensor = classical_fold(r, 1, (r0, r.shape[0], r1))
    return Mode2Qr(r_tensor=r_tensor, q=q)


def tr_inner(a_cores, b_cores):
    """Inner product of two ring-format tensors without materializing them.

    Composes the cross Grams ``P_n = lateral_gram(a_n, b_n)`` over modes
    ``N-1, ..., 0`` and closes both bond rings on the result ``C``:

        <A, B> = sum_{a, c} C[a, a, c, c]

    Cost is polynomial in the bond dimensions, linear in ``sum_n I_n``.  The
    two rings may have different bond dimensions but must share the mode
    sizes.
    """
    a_cores = validate_cores(a_cores)
    b_cores = validate_cores(b_cores)
    if len(a_cores) != len(b_cores):
        raise ValueError("rings have different numbers of modes")
    dims_a = tuple(g.shape[1] for g in a_cores)
    dims_b = tuple(g.shape[1] for g in b_cores)
    if dims_a != dims_b:
        raise ValueError(f"mode size mismatch: {dims_a} vs {dims_b}")
    out = lateral_gram(a_cores[-1], b_cores[-1])
    for n in range(len(a_cores) - 2, -1, -1):
        out = contract_24_13(out, lateral_gram(a_cores[n], b_cores[n]))
    return float(np.einsum("aacc->", out))


def tr_norm(cores):
    """Frobenius norm of a ring-format tensor.

    The self inner product can round to a tiny negative number near zero, so
    it is clamped at 0 before the square root.
    """
    return math.sqrt(max(0.0, tr_inner(cores, cores)))
