"""Select the kernel-evaluation backend at import time.

The compiled extension is used when it was built; otherwise the numpy
implementation is loaded. Set ``QUANTSPLINE_BACKEND=python`` to force the
fallback (useful for benchmarking and for checking the two agree).
"""

import os

if os.environ.get("QUANTSPLINE_BACKEND", "").lower() == "python":
    from . import _pykernels as _impl

    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _pykernels as _impl

        BACKEND = "python"

periodic_even_poly = _impl.periodic_even_poly
kernel_sum = _impl.kernel_sum

__all__ = ["BACKEND", "periodic_even_poly", "kernel_sum"]
