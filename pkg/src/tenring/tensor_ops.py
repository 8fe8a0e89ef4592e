"""Dense tensor primitives: unfoldings, folds, and tensor products.

Layout convention
-----------------
Every matricization in this package linearizes multi-indices
first-index-fastest: the flat position of element ``(i_0, ..., i_{N-1})`` is
``sum_n i_n * prod_{j<n} I_j``.  That is numpy's Fortran order, and every
reshape below passes ``order="F"`` explicitly.  Under this convention
:func:`split_unfold` is a pure reinterpretation of the flat buffer.

Modes are 0-based throughout the public API (formulas in the docstrings use
the same 0-based indices).  Unfoldings always return fresh arrays, never
views of their input.
"""

import numpy as np

from .validation import check_mode

__all__ = [
    "classical_unfold",
    "cyclic_unfold",
    "split_unfold",
    "classical_fold",
    "cyclic_fold",
    "split_fold",
    "ttm",
    "multi_ttm",
    "outer",
    "contract",
    "contract_24_13",
    "inner",
    "norm",
]


def _fresh(m, x):
    # unfold contract: never hand back memory aliasing the input
    if np.shares_memory(m, x):
        return m.copy()
    return m


def _cyclic_axis_order(mode, order):
    return [mode] + list(range(mode + 1, order)) + list(range(mode))


def _classical_axis_order(mode, order):
    return [mode] + [j for j in range(order) if j != mode]


def classical_unfold(x, mode):
    """Matricize ``x`` with ``mode`` as rows and the remaining modes in their
    original order as columns.

    Entry ``(i_n, lin(i_0, ..., i_{n-1}, i_{n+1}, ..., i_{N-1}))`` equals
    ``x[i_0, ..., i_{N-1}]`` where ``lin`` is the first-index-fastest
    linearization.

    Returns an ``I_n x prod(I_j, j != n)`` array.
    """
    x = np.asarray(x)
    mode = check_mode(mode, x.ndim)
    perm = _classical_axis_order(mode, x.ndim)
    m = x.transpose(perm).reshape(x.shape[mode], -1, order="F")
    return _fresh(m, x)


def cyclic_unfold(x, mode):
    """Matricize ``x`` with ``mode`` as rows and the remaining modes in
    cyclic order ``n+1, ..., N-1, 0, ..., n-1`` as columns.

    Entry ``(i_n, lin(i_{n+1}, ..., i_{N-1}, i_0, ..., i_{n-1}))`` equals
    ``x[i_0, ..., i_{N-1}]``.  Differs from :func:`classical_unfold` only by
    a permutation of the columns (and coincides with it for ``mode == 0``).
    """
    x = np.asarray(x)
    mode = check_mode(mode, x.ndim)
    perm = _cyclic_axis_order(mode, x.ndim)
    m = x.transpose(perm).reshape(x.shape[mode], -1, order="F")
    return _fresh(m, x)


def split_unfold(x, k):
    """Matricize ``x`` by splitting its modes after position ``k``.

    Rows carry ``lin(i_0, ..., i_{k-1})``, columns ``lin(i_k, ..., i_{N-1})``;
    ``k = 0`` gives a row vector and ``k = N`` a column vector.  Under the
    first-index-fastest layout no element moves: this is a reshape of the
    flat buffer.
    """
    x = np.asarray(x)
    if not 0 <= k <= x.ndim:
        raise ValueError(f"split point {k} out of range for order-{x.ndim} tensor")
    rows = int(np.prod(x.shape[:k])) if k > 0 else 1
    m = x.reshape(rows, -1, order="F")
    return _fresh(m, x)


def classical_fold(m, mode, shape):
    """Inverse of :func:`classical_unfold`: rebuild the tensor of ``shape``."""
    m = np.asarray(m)
    shape = tuple(int(s) for s in shape)
    mode = check_mode(mode, len(shape))
    perm = _classical_axis_order(mode, len(shape))
    _check_fold_shape(m, shape, perm)
    t = m.reshape([shape[j] for j in perm], order="F")
    return _fresh(t.transpose(np.argsort(perm)), m)


def cyclic_fold(m, mode, shape):
    """Inverse of :func:`cyclic_unfold`: rebuild the tensor of ``shape``."""
    m = np.asarray(m)
    shape = tuple(int(s) for s in shape)
    mode = check_mode(mode, len(shape))
    perm = _cyclic_axis_order(mode, len(shape))
    _check_fold_shape(m, shape, perm)
    t = m.reshape([shape[j] for j in perm], order="F")
    return _fresh(t.transpose(np.argsort(perm)), m)


def split_fold(m, k, shape):
    """Inverse of :func:`split_unfold`: rebuild the tensor of ``shape``."""
    m = np.asarray(m)
    shape = tuple(int(s) for s in shape)
    if not 0 <= k <= len(shape):
        raise ValueError(f"split point {k} out of range for order-{len(shape)} tensor")
    rows = int(np.prod(shape[:k])) if k > 0 else 1
    cols = int(np.prod(shape[k:])) if k < len(shape) else 1
    if m.shape != (rows, cols):
        raise ValueError(f"matrix shape {m.shape} does not match split {(rows, cols)}")
    return _fresh(m.reshape(shape, order="F"), m)


def _check_fold_shape(m, shape, perm):
    rows = shape[perm[0]]
    cols = int(np.prod([shape[j] for j in perm[1:]])) if len(perm) > 1 else 1
    if m.shape != (rows, cols):
        raise ValueError(
            f"matrix shape {m.shape} does not match unfolding shape {(rows, cols)} "
            f"of tensor shape {shape}"
        )


def ttm(x, u, mode):
    """Multiply ``x`` by the matrix ``u`` along ``mode``.

    ``u`` must have ``x.shape[mode]`` columns; the result replaces that mode
    by ``u.shape[0]``:

        out[..., j, ...] = sum_i u[j, i] * x[..., i, ...]
    """
    x = np.asarray(x)
    u = np.asarray(u)
    mode = check_mode(mode, x.ndim)
    if u.ndim != 2 or u.shape[1] != x.shape[mode]:
        raise ValueError(
            f"matrix of shape {u.shape} cannot multiply mode {mode} of size "
            f"{x.shape[mode]}"
        )
    out = np.tensordot(u, x, axes=(1, mode))
    return np.moveaxis(out, 0, mode)


def multi_ttm(x, factors):
    """Apply :func:`ttm` for several distinct modes.

    ``factors`` is an iterable of ``(mode, matrix)`` pairs.  The result does
    not depend on the application order; factors are applied in ascending
    mode order.
    """
    x = np.asarray(x)
    pairs = sorted(((check_mode(m, x.ndim), np.asarray(u)) for m, u in factors),
                   key=lambda p: p[0])
    modes = [m for m, _ in pairs]
    if len(set(modes)) != len(modes):
        raise ValueError(f"duplicate modes in multi_ttm: {modes}")
    out = x
    for mode, u in pairs:
        out = ttm(out, u, mode)
    return out


def outer(a, b):
    """Outer product: ``out[i..., j...] = a[i...] * b[j...]``."""
    return np.multiply.outer(np.asarray(a), np.asarray(b))


def contract(a, mode_a, b, mode_b):
    """Contract one mode of ``a`` against one mode of ``b``.

    Result modes are the remaining modes of ``a`` followed by the remaining
    modes of ``b``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    mode_a = check_mode(mode_a, a.ndim)
    mode_b = check_mode(mode_b, b.ndim)
    if a.shape[mode_a] != b.shape[mode_b]:
        raise ValueError(
            f"cannot contract size {a.shape[mode_a]} against size {b.shape[mode_b]}"
        )
    return np.tensordot(a, b, axes=(mode_a, mode_b))


def contract_24_13(a, b):
    """Contract modes (1, 3) of the 4th-order ``a`` against modes (0, 2) of
    the 4th-order ``b``.

        out[i, j, r, s] = sum_{m, k} a[i, m, r, k] * b[m, j, k, s]

    This is the composition rule for the bond-Gram tensors used by the
    chained normal-equation assembly; see :mod:`tenring.ring`.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 4 or b.ndim != 4:
        raise ValueError("contract_24_13 expects two 4th-order tensors")
    if a.shape[1] != b.shape[0] or a.shape[3] != b.shape[2]:
        raise ValueError(
            f"contracted pair mismatch: a has (axis1, axis3) = "
            f"{(a.shape[1], a.shape[3])}, b has (axis0, axis2) = "
            f"{(b.shape[0], b.shape[2])}"
        )
    return np.einsum("imrk,mjks->ijrs", a, b, optimize=True)


def inner(a, b):
    """Frobenius inner product of two same-shaped tensors."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.dot(a.ravel(), b.ravel()))


def norm(a):
    """Frobenius norm (the square root of the self inner product)."""
    return float(np.linalg.norm(np.asarray(a).ravel()))
