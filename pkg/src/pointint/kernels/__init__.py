"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The backend is picked once at import from ``POINTINT_BACKEND``
(``numba`` or ``numpy``). Without the variable, numba is used when it
imports cleanly.
"""

import os
import types

from . import _numpy

_NAMES = ("scatter_lambda", "odd_residual", "rk4_steps", "delta_chain")


def _load_numba():
    try:
        from . import _numba
    except ImportError:
        return None
    return _numba


def get_backend(name: str) -> types.SimpleNamespace:
    if name == "numpy":
        mod = _numpy
    elif name == "numba":
        mod = _load_numba()
        if mod is None:
            raise RuntimeError("numba backend requested but numba is not importable")
    else:
        raise ValueError(f"unknown backend {name!r}")
    return types.SimpleNamespace(name=name, **{n: getattr(mod, n) for n in _NAMES})


def _default_backend() -> str:
    requested = os.environ.get("POINTINT_BACKEND", "").strip().lower()
    if requested:
        return requested
    return "numba" if _load_numba() is not None else "numpy"


_active = get_backend(_default_backend())
BACKEND = _active.name
scatter_lambda = _active.scatter_lambda
odd_residual = _active.odd_residual
rk4_steps = _active.rk4_steps
delta_chain = _active.delta_chain
chain_product = _numpy.chain_product
