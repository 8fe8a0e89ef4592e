"""Input validation helpers shared by the solvers, the estimator and the CLI."""

import math
import os

import numpy as np

DEFAULT_ELEMENT_BUDGET = 1 << 27
BUDGET_ENV_VAR = "TENRING_BUDGET"


class ElementBudgetError(MemoryError):
    """Raised when an operation would materialize a dense tensor larger than
    the configured element budget."""


def element_budget(override=None):
    """Resolve the dense-tensor element budget.

    Priority: explicit ``override``, then the ``TENRING_BUDGET`` environment
    variable, then the built-in default of 2**27 elements (1 GiB of float64).
    """
    if override is not None:
        return int(override)
    env = os.environ.get(BUDGET_ENV_VAR)
    if env is not None:
        return int(env)
    return DEFAULT_ELEMENT_BUDGET


def check_element_budget(shape, budget=None):
    """Raise :class:`ElementBudgetError` if ``prod(shape)`` exceeds the budget."""
    limit = element_budget(budget)
    n = math.prod(int(s) for s in shape)
    if n > limit:
        raise ElementBudgetError(
            f"dense tensor with {n} elements exceeds the element budget of "
            f"{limit}; raise it via {BUDGET_ENV_VAR} or an explicit budget"
        )
    return n


def check_dense_tensor(x, min_order=1):
    """Coerce ``x`` to a float64 ndarray and check it is usable.

    Rejects empty tensors, non-finite entries and orders below ``min_order``.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim < min_order:
        raise ValueError(f"tensor order {x.ndim} is below the minimum {min_order}")
    if x.size == 0:
        raise ValueError("tensor has no elements")
    if not np.all(np.isfinite(x)):
        raise ValueError("tensor contains non-finite entries")
    return x


def check_ranks(ranks, order):
    """Validate a bond-dimension vector for a tensor of the given order."""
    ranks = [int(r) for r in ranks]
    if len(ranks) != order:
        raise ValueError(f"expected {order} ranks, got {len(ranks)}")
    if any(r < 1 for r in ranks):
        raise ValueError("ranks must be positive")
    return ranks


def check_mode(mode, order):
    """Validate a 0-based mode index."""
    mode = int(mode)
    if not 0 <= mode < order:
        raise ValueError(f"mode {mode} out of range for order-{order} tensor")
    return mode
