"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
module takes over with identical results. Set ``FSMREQ_PURE_PYTHON=1`` to force
the fallback. The compiled kernels encode allowed-output sets as 64-bit masks,
so machines with more than ``MAX_COMPILED_OUTPUTS`` outputs always run on the
Python backend (see :func:`for_outputs`).
"""

import os

from fsmreq import _pykernels as python_backend

try:
    from fsmreq import _ckernels as compiled_backend
except ImportError:  # extension not built
    compiled_backend = None

MAX_COMPILED_OUTPUTS = 62

if compiled_backend is not None and os.environ.get("FSMREQ_PURE_PYTHON", "") in ("", "0"):
    active = compiled_backend
else:
    active = python_backend

BACKEND = active.BACKEND


def for_outputs(n_outputs: int):
    """Backend module able to handle ``n_outputs`` output symbols."""
    if n_outputs > MAX_COMPILED_OUTPUTS:
        return python_backend
    return active


def backends() -> dict:
    """All importable backends by name."""
    found = {"python": python_backend}
    if compiled_backend is not None:
        found["cython"] = compiled_backend
    return found


first_difference = active.first_difference
violation_direct = active.violation_direct
violation_inclusion = active.violation_inclusion
first_failure_equiv = active.first_failure_equiv
first_failure_reduction = active.first_failure_reduction
