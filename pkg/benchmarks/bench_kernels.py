"""Throughput comparison of the compiled and pure-Python kernel backends.

Times the per-pipe functions the solvers hammer (pressure functions,
derivatives, Colebrook friction factor) and one full fixture solve per
backend.  Run from the repository root:

    python benchmarks/bench_kernels.py
"""

import json
import time
from pathlib import Path

from loopflow import _kernels_py
from loopflow.fileio import network_from_dict
from loopflow.solvers import SolverConfig, solve_node_loop

try:
    from loopflow import _kernels
except ImportError:
    _kernels = None

FIXTURE = Path(__file__).resolve().parent.parent / "src" / "loopflow" / "data"

CASES = [
    ("renouard_drop", "renouard_drop", (0.6, 100.0, 0.0556, 0.4064)),
    ("renouard_drop_dflow", "renouard_drop_dflow", (0.6, 100.0, 0.0556, 0.4064)),
    ("colebrook_friction_factor", "colebrook_friction_factor", (195566.0, 4.92e-5)),
    ("darcy_weisbach_drop", "darcy_weisbach_drop", (0.016, 100.0, 0.0556, 0.4064, 1000.0)),
    ("flow_velocity", "flow_velocity", (0.25, 0.341, 0.4064)),
]

REPEAT = 200_000


def time_callable(func, args, repeat=REPEAT) -> float:
    start = time.perf_counter()
    for _ in range(repeat):
        func(*args)
    return time.perf_counter() - start


def bench_kernels() -> None:
    print(f"{'kernel':<28} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for label, name, args in CASES:
        t_py = time_callable(getattr(_kernels_py, name), args)
        if _kernels is None:
            print(f"{label:<28} {t_py:>9.3f}s {'-':>10} {'-':>8}")
            continue
        t_c = time_callable(getattr(_kernels, name), args)
        print(f"{label:<28} {t_py:>9.3f}s {t_c:>9.3f}s {t_py / t_c:>7.1f}x")


def bench_solve() -> None:
    import loopflow.kernels as kernels

    print(f"\nfull node-loop fixture solve ({REPEAT // 2000} runs each):")
    for fixture in ("fixture_gas.json", "fixture_water.json"):
        net = network_from_dict(json.loads((FIXTURE / fixture).read_text()))
        for backend_name, module in (("python", _kernels_py), ("compiled", _kernels)):
            if module is None:
                continue
            _use_backend(kernels, module)
            start = time.perf_counter()
            for _ in range(REPEAT // 2000):
                solve_node_loop(net, SolverConfig())
            elapsed = time.perf_counter() - start
            print(f"  {fixture:<20} {backend_name:<9} {elapsed:8.3f}s")
    _use_backend(kernels, _kernels or _kernels_py)


def _use_backend(kernels_module, impl) -> None:
    # Rebind the selected implementation; fluids.py calls through the
    # kernels module, so this swaps the backend for the whole library.
    for name in ("renouard_drop", "renouard_drop_dflow", "renouard_drop_ddiam",
                 "reynolds_number", "colebrook_friction_factor",
                 "darcy_weisbach_drop", "darcy_weisbach_drop_dflow",
                 "darcy_weisbach_drop_ddiam", "flow_velocity"):
        setattr(kernels_module, name, getattr(impl, name))


if __name__ == "__main__":
    print(f"compiled backend available: {_kernels is not None}")
    bench_kernels()
    bench_solve()
