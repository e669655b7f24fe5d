"""Compare the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Kernel timings call both modules directly. The end-to-end epoch timing runs
a fresh interpreter per backend (the backend is fixed at import time, see
``DIONET_KERNELS``).
"""
from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import timeit
from array import array

from dionet import _pykernels

try:
    from dionet import _kernels
except ImportError:
    _kernels = None

EPOCH_SNIPPET = """
import time
from dionet.losses import LossConfig
from dionet.tasks import synthetic_classification
from dionet.training import TrainingConfig, train
net, tr, va, kind = synthetic_classification(seed=0, n=400, hidden_units=16)
t0 = time.perf_counter()
train(net, tr, va, TrainingConfig(eta=0.3, epochs=5, batch_size=32), LossConfig(kind, gamma=0.5, epsilon=0.1))
print(time.perf_counter() - t0)
"""


def _buf(rng, n):
    return array("d", (rng.uniform(-1, 1) for _ in range(n)))


def kernel_cases(rng):
    n, k, m = 64, 32, 32
    a, b = _buf(rng, n * k), _buf(rng, k * m)
    w, bias = _buf(rng, m * k), _buf(rng, m)
    g = _buf(rng, n * m)
    x, y = _buf(rng, 10_000), _buf(rng, 10_000)
    z = _buf(rng, 10_000)
    quad = array("d", [0.3, 1.0, 0.5, 0.2, 2.0])
    return {
        "matmul 64x32 @ 32x32": lambda mod: mod.matmul(a, b, n, k, m),
        "dense_forward n=64 32->32": lambda mod: mod.dense_forward(w, bias, a, n, k, m),
        "dense_backward n=64 32->32": lambda mod: mod.dense_backward(w, a, g, n, k, m),
        "axpy len=10000": lambda mod: mod.axpy(0.5, x, y),
        "round_ties_to_zero len=10000": lambda mod: mod.round_ties_to_zero(x),
        "act_forward quadratic len=10000": lambda mod: mod.act_forward(4, quad, z),
        "act_deriv sigmoid len=10000": lambda mod: mod.act_deriv(2, quad, z),
    }


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def epoch_time(backend):
    env = dict(os.environ, DIONET_KERNELS=backend)
    out = subprocess.run([sys.executable, "-c", EPOCH_SNIPPET], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; only the Python fallback is available")
        return 1
    rng = random.Random(0)
    print(f"{'case':<36}{'python (ms)':>14}{'cython (ms)':>14}{'speedup':>10}")
    for name, fn in kernel_cases(rng).items():
        tp = best_of(lambda: fn(_pykernels), args.repeat)
        tc = best_of(lambda: fn(_kernels), args.repeat)
        print(f"{name:<36}{tp * 1e3:>14.3f}{tc * 1e3:>14.3f}{tp / tc:>9.1f}x")
    tp, tc = epoch_time("python"), epoch_time("cython")
    print(f"{'train 5 epochs (n=400, 2-16-2 MLP)':<36}{tp * 1e3:>14.1f}{tc * 1e3:>14.1f}{tp / tc:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
