"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the raw gate kernels on a 13-qubit state (the largest the protocol
uses: n=4 message -> 3n+1 qubits) and two end-to-end workloads, with both
backends. Run as:  python3 benchmarks/bench_kernels.py
"""

import sys
import time

import numpy as np

from qteleport import _kernels_py

try:
    from qteleport import _kernels_cy
except ImportError:
    _kernels_cy = None

BACKENDS = [("python", _kernels_py)] + (
    [("cython", _kernels_cy)] if _kernels_cy is not None else []
)


def _time(fn, reps):
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t0) / reps


def bench_kernels(n_qubits=13, reps=200):
    rng = np.random.default_rng(0)
    dim = 1 << n_qubits
    amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    amps /= np.linalg.norm(amps)
    g = (0.6 + 0j, 0.8 + 0j, -0.8 + 0j, 0.6 + 0j)
    rows = []
    for name, backend in BACKENDS:
        work = amps.copy()
        t_single = _time(lambda: backend.apply_ctrl_2x2(work, 0, 1 << 6, *g), reps)
        t_cnot = _time(
            lambda: backend.apply_ctrl_2x2(work, 1 << 12, 1 << 0, 0j, 1 + 0j, 1 + 0j, 0j),
            reps,
        )
        t_mc = _time(
            lambda: backend.apply_ctrl_2x2(work, (1 << 12) | (1 << 11) | (1 << 10), 1 << 0, *g),
            reps,
        )
        t_layer = _time(lambda: backend.apply_xlayer(work, 0b1011), reps)
        t_prob = _time(lambda: backend.bit0_and_total_sq(work, 1 << 5), reps)
        rows.append((name, t_single, t_cnot, t_mc, t_layer, t_prob))
    print(f"\nraw kernels on a {n_qubits}-qubit state ({reps} reps, microseconds/op):")
    print(f"{'backend':<8} {'single':>8} {'cnot':>8} {'multi-ctl':>10} {'xlayer':>8} {'prob':>8}")
    for name, *ts in rows:
        print(f"{name:<8} " + " ".join(f"{t * 1e6:>8.1f}" for t in ts[:3])
              + f" {ts[3] * 1e6:>8.1f} {ts[4] * 1e6:>8.1f}")
    return rows


def bench_protocol():
    # end-to-end workloads, re-importing with the backend forced via env
    import importlib
    import os

    results = {}
    for name, _ in BACKENDS:
        os.environ["QTELEPORT_PURE_PYTHON"] = "1" if name == "python" else "0"
        for mod in [m for m in list(sys.modules) if m.startswith("qteleport")]:
            del sys.modules[mod]
        qt = importlib.import_module("qteleport")
        assert qt.backend_name() == name
        rng = np.random.default_rng(1)
        ch4 = qt.random_channel(4, rng)
        msg4 = qt.random_message(4, rng)
        t0 = time.perf_counter()
        for _ in range(5):
            qt.enumerate_branches(msg4, ch4)
        t_exact = (time.perf_counter() - t0) / 5
        ch1 = qt.ChannelSpec(1, (0.6, 0.8))
        msg1 = qt.random_message(1, rng)
        t0 = time.perf_counter()
        qt.sample_shots(msg1, ch1, 0, 20_000)
        t_mc = (time.perf_counter() - t0) / 20_000
        results[name] = (t_exact, t_mc)
    print("\nend-to-end (per run):")
    print(f"{'backend':<8} {'n=4 exact enumeration':>24} {'n=1 sampled shot':>18}")
    for name, (t_exact, t_mc) in results.items():
        print(f"{name:<8} {t_exact * 1e3:>21.1f} ms {t_mc * 1e6:>15.1f} us")
    if len(results) == 2:
        s_exact = results["python"][0] / results["cython"][0]
        s_mc = results["python"][1] / results["cython"][1]
        print(f"\ncython speedup: exact {s_exact:.1f}x, sampled shot {s_mc:.1f}x")


if __name__ == "__main__":
    if _kernels_cy is None:
        print("compiled backend not built; benchmarking the fallback only")
    bench_kernels()
    bench_protocol()
