"""Pick the compiled kernels when importable, else the pure-Python ones.

Set ``UNDERSPEC_PURE_PYTHON=1`` to force the fallback.
"""
import os

if os.environ.get("UNDERSPEC_PURE_PYTHON", "") not in ("", "0"):
    from . import _pycore as core
else:
    try:
        from . import _core as core
    except ImportError:  # extension not built
        from . import _pycore as core

BACKEND = core.BACKEND
