"""Compare the numba and numpy backends of the hot kernels.

Kernel timings call both implementations directly in one process. The
end-to-end timing runs a short explicit solve twice in subprocesses, once
with ``MIXEDFLOW_DISABLE_NUMBA=1``.

    python3 benchmarks/bench_kernels.py [--points 100000] [--repeat 5]
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from mixedflow import kernels
from mixedflow.conductivity import canonical_interpolated, canonical_piecewise

SOLVE_SNIPPET = """
import time
from mixedflow import BoundaryProfile, Grid, PressureField, SolverConfig, solve_ibvp
from mixedflow._accel import backend_name
from mixedflow.conductivity import canonical_interpolated
from mixedflow.experiments import sine_field
g = Grid((1.0,), (200,))
m = canonical_interpolated()
solve_ibvp(PressureField(g, sine_field(g)), BoundaryProfile.zero(), m, 0.01, SolverConfig())  # warm-up / JIT
t0 = time.perf_counter()
res = solve_ibvp(PressureField(g, sine_field(g)), BoundaryProfile.zero(), m, 1.0, SolverConfig())
print(backend_name(), res.n_steps, time.perf_counter() - t0)
"""


def _best(fn, repeat):
    fn()  # warm-up / JIT
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_kernels(points, repeat):
    rng = np.random.default_rng(0)
    xi = np.exp(rng.uniform(np.log(1e-6), np.log(1e6), points))
    rows = []
    for model in (canonical_interpolated(), canonical_piecewise()):
        kind, scal, coefs, exps = (np.asarray(a, float) if i else a for i, a in enumerate(model.kernel_args()))
        args = (kind, scal, coefs, exps, xi, kernels.DEFAULT_RTOL, kernels.DEFAULT_MAXITER)
        t_nb = _best(lambda: kernels._k_nb(*args), repeat)
        t_np = _best(lambda: kernels._k_np(*args), repeat)
        rows.append((f"K[{type(model).__name__.lower()}] n={points}", t_nb, t_np))

    model = canonical_interpolated()
    kind, scal, coefs, exps = (np.asarray(a, float) if i else a for i, a in enumerate(model.kernel_args()))
    n = 1000
    xe = np.concatenate([[0.0], (np.arange(n) + 0.5) / n, [1.0]])
    pe = np.sin(np.pi * xe)
    a1 = (pe, xe, 1.0 / n, kind, scal, coefs, exps, kernels.DEFAULT_RTOL, kernels.DEFAULT_MAXITER)
    rows.append((f"rates_1d n={n}", _best(lambda: kernels._rates_1d_nb(*a1), repeat),
                 _best(lambda: kernels._rates_1d_np(*a1), repeat)))

    m2 = 128
    c = np.concatenate([[0.0], (np.arange(m2) + 0.5) / m2, [1.0]])
    X, Y = np.meshgrid(c, c, indexing="ij")
    pe2 = np.sin(np.pi * X) * np.sin(np.pi * Y)
    a2 = (pe2, c, c, 1.0 / m2, 1.0 / m2, kind, scal, coefs, exps, kernels.DEFAULT_RTOL, kernels.DEFAULT_MAXITER)
    rows.append((f"rates_2d {m2}x{m2}", _best(lambda: kernels._rates_2d_nb(*a2), repeat),
                 _best(lambda: kernels._rates_2d_np(*a2), repeat)))
    return rows


def bench_solve():
    out = {}
    for disable in ("0", "1"):
        env = dict(os.environ, MIXEDFLOW_DISABLE_NUMBA=disable)
        res = subprocess.run([sys.executable, "-c", SOLVE_SNIPPET], env=env, capture_output=True, text=True, check=True)
        name, steps, secs = res.stdout.split()
        out[name] = (int(steps), float(secs))
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--no-solve", action="store_true", help="skip the end-to-end subprocess timing")
    args = ap.parse_args(argv)

    print(f"{'kernel':<28} {'numba [ms]':>12} {'numpy [ms]':>12} {'speedup':>9}")
    for name, t_nb, t_np in bench_kernels(args.points, args.repeat):
        print(f"{name:<28} {1e3 * t_nb:12.3f} {1e3 * t_np:12.3f} {t_np / t_nb:9.1f}")
    if not args.no_solve:
        res = bench_solve()
        (s_nb, t_nb), (s_np, t_np) = res["numba"], res["numpy"]
        print(f"{'solve 1D N=200 T=1':<28} {1e3 * t_nb:12.1f} {1e3 * t_np:12.1f} {t_np / t_nb:9.1f}  ({s_nb} steps)")


if __name__ == "__main__":
    main()
