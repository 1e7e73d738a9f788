"""Compare the compiled kernels against the pure-Python fallback.

Run with ``python3 benchmarks/bench_kernels.py``.  Prints wall time per
call and the speed-up for the compensated row mean and the Jacobi
eigensolver, plus the largest disagreement between the two backends.
"""
import argparse
import timeit

import numpy as np

from dirac_esh._backend import available_backends


def bench(fn, repeat):
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    backends = available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; only the Python backend is available")
    rng = np.random.default_rng(args.seed)
    cases = []
    for rows, cols in ((4, 4096), (16, 65536)):
        vals = np.ascontiguousarray(rng.normal(size=(rows, cols)))
        cases.append((f"kahan_mean_rows {rows}x{cols}", "kahan_mean_rows", (vals,)))
    for dim in (8, 20, 40):
        a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        a = np.ascontiguousarray(a + a.conj().T)
        cases.append((f"jacobi_eigh dim={dim}", "jacobi_eigh", (a,)))

    print(f"{'kernel':<28}" + "".join(f"{name:>14}" for name in backends) + f"{'speed-up':>12}{'max diff':>12}")
    for label, fname, inputs in cases:
        times, outputs = {}, {}
        for name, mod in backends.items():
            fn = getattr(mod, fname)
            outputs[name] = fn(*inputs)
            times[name] = bench(lambda: fn(*inputs), args.repeat)
        if fname == "jacobi_eigh":
            diffs = [np.sort(o[0]) for o in outputs.values()]
        else:
            diffs = list(outputs.values())
        diff = max(float(np.max(np.abs(np.asarray(d) - np.asarray(diffs[0])))) for d in diffs)
        speed = times["python"] / times["compiled"] if "compiled" in times else 1.0
        print(f"{label:<28}" + "".join(f"{times[n] * 1e3:>12.3f}ms" for n in backends)
              + f"{speed:>11.1f}x{diff:>12.1e}")


if __name__ == "__main__":
    main()
