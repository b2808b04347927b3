"""Compare the numba and numpy backends of the local Kraus kernel.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]

Also times one full lifetime simulation per backend by toggling the default
backend for the simulator.
"""

import argparse
import time

import numpy as np

from qshannon import _accel
from qshannon import circuits as cc
from qshannon import linalg as la
from qshannon import simulator as sim


def best_time(fn, repeats):
    fn()  # warm-up, includes JIT compilation
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_rows(repeats):
    rng = np.random.default_rng(0)
    one = np.array([la.random_unitary(2, rng) / 2 for _ in range(4)])
    two = np.array([la.random_unitary(4, rng) / 2 for _ in range(4)])
    rows = []
    for n in (2, 3, 4, 5):
        rho = la.random_density(2**n, rng)
        for label, ops, tg in (("1q", one, (n - 1,)), ("2q", two, (0, n - 1))):
            times = {}
            for backend in ("numpy", "numba"):
                times[backend] = best_time(lambda: _accel.apply_local_kraus(rho, ops, tg, n, backend=backend), repeats)
            rows.append((n, label, times["numpy"], times["numba"]))
    return rows


def simulation_time(backend):
    c = cc.append_identity_rounds(cc.build_prep_circuit("00", True, "standard"), 10)
    old = _accel.DEFAULT_BACKEND
    _accel.DEFAULT_BACKEND = backend
    try:
        return best_time(lambda: sim.simulate_exact(c, sim.DepolarizingNoise(0.05)), 3)
    finally:
        _accel.DEFAULT_BACKEND = old


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=200)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba unavailable (or QSHANNON_NO_NUMBA set); nothing to compare")
    print(f"{'qubits':>6} {'op':>3} {'numpy_us':>10} {'numba_us':>10} {'speedup':>8}")
    for n, label, t_np, t_nb in kernel_rows(args.repeats):
        print(f"{n:>6} {label:>3} {t_np * 1e6:>10.1f} {t_nb * 1e6:>10.1f} {t_np / t_nb:>8.2f}")
    t_np, t_nb = simulation_time("numpy"), simulation_time("numba")
    print(f"5-qubit circuit, 10 identity rounds: numpy {t_np * 1e3:.1f} ms, numba {t_nb * 1e3:.1f} ms, speedup {t_np / t_nb:.2f}")


if __name__ == "__main__":
    main()
