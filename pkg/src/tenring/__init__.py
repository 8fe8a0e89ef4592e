"""Tensor-ring decomposition by alternating least squares.

Representation: an order-N tensor is stored as N third-order cores multiplied
circularly; see :mod:`tenring.ring`.  Fitting: four ALS variants trading
speed against numerical robustness; see :mod:`tenring.solvers` or the
scikit-learn style :class:`TensorRingALS` front end.
"""

from .estimator import TensorRingALS
from .ring import (
    Mode2Qr,
    gram_chain,
    gram_chain_order,
    lateral_gram,
    mode2_qr,
    random_cores,
    reconstruct,
    subchain_merge,
    subchain_skip,
    tr_inner,
    tr_norm,
    validate_cores,
)
from .solvers import (
    VARIANTS,
    AlsConfig,
    AlsReport,
    cheap_relative_error,
    decompose,
    exact_relative_error,
    tr_als,
    tr_als_ne,
    tr_als_qr,
    tr_als_qrne,
)
from .synthetic import SynthSpec, add_noise, make_dataset

__version__ = "0.1.0"

__all__ = [
    "TensorRingALS",
    "Mode2Qr",
    "gram_chain",
    "gram_chain_order",
    "lateral_gram",
    "mode2_qr",
    "random_cores",
    "reconstruct",
    "subchain_merge",
    "subchain_skip",
    "tr_inner",
    "tr_norm",
    "validate_cores",
    "VARIANTS",
    "AlsConfig",
    "AlsReport",
    "cheap_relative_error",
    "decompose",
    "exact_relative_error",
    "tr_als",
    "tr_als_ne",
    "tr_als_qr",
    "tr_als_qrne",
    "SynthSpec",
    "add_noise",
    "make_dataset",
    "__version__",
]
