"""Backend selection for the sampling kernels.

The compiled extension is used when it imports; otherwise the pure-Python
twin. Set ``BANDIT_ELIM_PURE_PYTHON=1`` to force the fallback.
"""
import os

import numpy as np

from . import _purepy

if os.environ.get("BANDIT_ELIM_PURE_PYTHON", "") not in ("", "0"):
    _impl = _purepy
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _purepy
        BACKEND = "python"

bernoulli_sums = _impl.bernoulli_sums
gaussian_sums = _impl.gaussian_sums
uniforms = _impl.uniforms

derive_keys = _impl.derive_keys


def derive_key_scalar(master_seed: int, trial_index: int, arm: int) -> int:
    """Key of one arm's stream in plain integer arithmetic."""
    h = _purepy.hash2
    return h(h(h(0, master_seed), trial_index), arm)
