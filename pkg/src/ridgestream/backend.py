"""Backend selection for the hot stream kernels.

Two interchangeable implementations exist: jitted loops (``_kernels_numba``)
and vectorized numpy (``_kernels_numpy``). The jitted path is used whenever
numba imports cleanly; set ``RIDGESTREAM_NUMBA=0`` to force the numpy path.
The flag only changes how the arithmetic is scheduled, never what is
computed, so experiment results do not depend on it beyond float rounding.
"""

import os
import warnings

from . import _kernels_numpy

_FALSY = {"0", "no", "off", "false"}


def _pick():
    flag = os.environ.get("RIDGESTREAM_NUMBA", "auto").strip().lower()
    if flag in _FALSY:
        return _kernels_numpy, "numpy"
    try:
        from . import _kernels_numba
    except ImportError:
        if flag not in ("", "auto"):
            warnings.warn(
                "RIDGESTREAM_NUMBA requested the jitted backend but numba is "
                "not importable; falling back to numpy",
                RuntimeWarning,
            )
        return _kernels_numpy, "numpy"
    return _kernels_numba, "numba"


_impl, BACKEND = _pick()

sm_step = _impl.sm_step
ridge_stream = _impl.ridge_stream
kernel_stream = _impl.kernel_stream


def implementations():
    """Name -> module map of the importable kernel implementations."""
    impls = {"numpy": _kernels_numpy}
    try:
        from . import _kernels_numba

        impls["numba"] = _kernels_numba
    except ImportError:
        pass
    return impls
