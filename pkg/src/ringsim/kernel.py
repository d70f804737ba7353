"""Kernel backend selection.

Prefers the compiled extension; falls back to the pure-Python implementation.
Force a backend with RINGSIM_KERNEL=c or RINGSIM_KERNEL=py.
"""

import os

_requested = os.environ.get("RINGSIM_KERNEL", "auto")

if _requested == "py":
    from ringsim import _kernel_py as _impl

    BACKEND = "python"
elif _requested == "c":
    from ringsim import _kernel as _impl  # type: ignore[no-redef]

    BACKEND = "c"
elif _requested == "auto":
    try:
        from ringsim import _kernel as _impl  # type: ignore[no-redef]

        BACKEND = "c"
    except ImportError:
        from ringsim import _kernel_py as _impl  # type: ignore[no-redef]

        BACKEND = "python"
else:
    raise RuntimeError(f"RINGSIM_KERNEL must be 'c', 'py' or 'auto', got {_requested!r}")

headways = _impl.headways
idm_accel_ring = _impl.idm_accel_ring
euler_step = _impl.euler_step
run_idm_rollout = _impl.run_idm_rollout


def backend_name():
    """Name of the active stepping backend ('c' or 'python')."""
    return BACKEND
