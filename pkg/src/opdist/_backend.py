"""Select the compiled transport kernel when available.

Set ``OPDIST_PURE_PYTHON=1`` to force the pure-Python fallback.
"""
import os

from . import _transport_py

python_min_cost_transport = _transport_py.min_cost_transport
compiled_min_cost_transport = None

if os.environ.get("OPDIST_PURE_PYTHON", "") not in ("", "0"):
    BACKEND = "python"
else:
    try:
        from ._transport import min_cost_transport as compiled_min_cost_transport
    except ImportError:
        BACKEND = "python"
    else:
        BACKEND = "cython"

min_cost_transport = compiled_min_cost_transport if BACKEND == "cython" else python_min_cost_transport
