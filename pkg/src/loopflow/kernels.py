"""Kernel backend selection: compiled extension if built, else pure Python.

Both backends expose the same nine scalar functions with identical
semantics; `BACKEND` records which one is active.  `benchmarks/` in the
source tree compares their throughput.
"""

from . import _kernels_py

try:  # compiled twin, built by setup.py when Cython is available
    from . import _kernels as _impl  # type: ignore[attr-defined]
    BACKEND = "compiled"
except ImportError:
    _impl = _kernels_py
    BACKEND = "python"

RENOUARD_COEFF = _kernels_py.RENOUARD_COEFF
RENOUARD_FLOW_EXP = _kernels_py.RENOUARD_FLOW_EXP
RENOUARD_DIAM_EXP = _kernels_py.RENOUARD_DIAM_EXP
LAMINAR_RE_LIMIT = _kernels_py.LAMINAR_RE_LIMIT
TURBULENT_RE_LIMIT = _kernels_py.TURBULENT_RE_LIMIT

renouard_drop = _impl.renouard_drop
renouard_drop_dflow = _impl.renouard_drop_dflow
renouard_drop_ddiam = _impl.renouard_drop_ddiam
reynolds_number = _impl.reynolds_number
colebrook_friction_factor = _impl.colebrook_friction_factor
darcy_weisbach_drop = _impl.darcy_weisbach_drop
darcy_weisbach_drop_dflow = _impl.darcy_weisbach_drop_dflow
darcy_weisbach_drop_ddiam = _impl.darcy_weisbach_drop_ddiam
flow_velocity = _impl.flow_velocity
