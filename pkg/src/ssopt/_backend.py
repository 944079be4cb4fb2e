"""Selects the kernel implementation at import time.

The compiled extension is preferred when present; the NumPy module is the
fallback. ``SSOPT_BACKEND`` overrides the choice:

* ``auto`` (default) -- compiled if importable, else NumPy
* ``compiled``       -- require the extension, fail loudly if missing
* ``numpy``          -- force the fallback (used by the backend benchmark)

Even under the compiled backend the separable exponential kernels stay on
NumPy: its vectorized expm1/exp beat a serial libm loop by a wide margin
(see benchmarks/compare_backends.py), while the stencil-coupled kernels and
the tridiagonal matvec are several times faster compiled.
"""
import os
import types

from ssopt import _kernels_np

#: kernels that are faster in the NumPy implementation regardless of backend
_VECTORIZED_WINS = (
    "grad_expm1", "obj_exp_linear", "grad_weighted_expm1", "obj_weighted_exp_linear",
)

_choice = os.environ.get("SSOPT_BACKEND", "auto").strip().lower()

if _choice not in ("auto", "compiled", "numpy"):
    raise RuntimeError(
        f"SSOPT_BACKEND={_choice!r} not understood; use auto, compiled or numpy"
    )

_compiled = None
if _choice in ("auto", "compiled"):
    try:
        from ssopt import _kernels as _compiled
    except ImportError:
        if _choice == "compiled":
            raise RuntimeError(
                "SSOPT_BACKEND=compiled but the ssopt._kernels extension is "
                "not built; reinstall with a C compiler and Cython available"
            ) from None

if _compiled is None:
    BACKEND = "numpy"
    kernels = _kernels_np
else:
    BACKEND = "compiled"
    kernels = types.SimpleNamespace(**{
        name: getattr(_kernels_np if name in _VECTORIZED_WINS else _compiled, name)
        for name in dir(_kernels_np) if not name.startswith("_") and name != "np"
    })


def backend_name() -> str:
    """Name of the active kernel backend ('compiled' or 'numpy')."""
    return BACKEND
