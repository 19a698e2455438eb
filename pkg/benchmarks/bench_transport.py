"""Compare the compiled and pure-Python transport kernels.

    python3 benchmarks/bench_transport.py [--repeat 5]

Times single solves at a few matrix sizes, then a full all-pairs opinion
distance matrix over a synthetic corpus, once per kernel.
"""
import argparse
import time

import numpy as np

from opdist import _backend
from opdist.distance import distance_matrix
from opdist.lexicon import load_shifters
from opdist.matching import solve_transport
from opdist.polarity import RepresentConfig, represent_opinion
from opdist.spotter import spot
from opdist.synthetic import contrastive_resources, make_contrastive_corpus


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--opinions", type=int, default=60, help="opinions per cluster in the all-pairs run")
    args = ap.parse_args()

    kernels = {"python": _backend.python_min_cost_transport}
    if _backend.compiled_min_cost_transport is None:
        print("compiled kernel not available; timing the pure-Python kernel only")
    else:
        kernels["cython"] = _backend.compiled_min_cost_transport

    rng = np.random.default_rng(0)
    print(f"{'case':<28}" + "".join(f"{k:>12}" for k in kernels) + ("     speedup" if len(kernels) == 2 else ""))
    for n1, n2 in ((3, 4), (8, 8), (16, 12), (32, 32)):
        costs = [rng.random((n1, n2)) for _ in range(50)]
        row = {k: best_of(lambda: [solve_transport(c, kernel=fn) for c in costs], args.repeat) for k, fn in kernels.items()}
        print(_line(f"50 solves {n1}x{n2}", row))

    ds = make_contrastive_corpus(args.opinions, seed=0)
    gaz, lex = contrastive_resources()
    sh = load_shifters()
    reps = [represent_opinion(o, spot(gaz, o), RepresentConfig(), lexicon=lex, shifters=sh) for o in ds]
    row = {}
    saved = _backend.min_cost_transport
    try:
        for k, fn in kernels.items():
            _backend.min_cost_transport = fn
            row[k] = best_of(lambda: distance_matrix(ds, "od", resources={"reps": reps}), max(1, args.repeat // 2))
    finally:
        _backend.min_cost_transport = saved
    print(_line(f"OD matrix {len(ds)}x{len(ds)}", row))


def _line(label, row):
    s = f"{label:<28}" + "".join(f"{v * 1e3:>10.1f}ms" for v in row.values())
    if len(row) == 2:
        s += f"{row['python'] / row['cython']:>11.1f}x"
    return s


if __name__ == "__main__":
    main()
