"""Compare the compiled and pure-Python row-reduction kernels.

Runs rank computations on the solution systems of the catalog matroids
(transposed, since solutions form a left kernel) and on random dense
matrices, once per available backend, and checks the backends agree.

    python3 benchmarks/bench_elimination.py [--repeat N] [--json out.json]
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from regmat.linalg import available_backends, rank_ff
from regmat.matroid import catalog
from regmat.solver import membership_system


def cases(seed: int):
    for name in ("K33", "K5", "R10"):
        for ell in (2, 3):
            sys_ = membership_system(catalog(name), ell)
            yield f"{name} ell={ell} {sys_.shape[0]}x{sys_.shape[1]}", np.ascontiguousarray(sys_.condition.T), ell
    rng = np.random.default_rng(seed)
    for p, size in ((2, 2048), (3, 1024), (251, 512), (65521, 256)):
        yield f"random p={p} {size}x{size}", rng.integers(0, p, size=(size, size)), p


def bench(repeat: int, seed: int) -> list[dict]:
    backends = available_backends()
    rows = []
    for label, M, p in cases(seed):
        row = {"case": label}
        ranks = {}
        for name, kern in backends.items():
            for packed in ((True, False) if p == 2 else (False,)):
                key = f"{name}{'-packed' if packed else ''}"
                best = float("inf")
                for _ in range(repeat):
                    t = time.perf_counter()
                    ranks[key] = rank_ff(M, p, packed=packed, kernels=kern)
                    best = min(best, time.perf_counter() - t)
                row[key] = best
        if len(set(ranks.values())) != 1:
            raise AssertionError(f"{label}: backends disagree {ranks}")
        row["rank"] = next(iter(ranks.values()))
        rows.append(row)
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", help="also write the timings here")
    args = ap.parse_args()
    rows = bench(args.repeat, args.seed)
    keys = sorted({k for r in rows for k in r if k not in ("case", "rank")})
    print(f"{'case':<34}{'rank':>7}" + "".join(f"{k:>16}" for k in keys))
    for r in rows:
        cells = "".join(f"{r[k] * 1e3:>14.2f}ms" if k in r else f"{'-':>16}" for k in keys)
        print(f"{r['case']:<34}{r['rank']:>7}{cells}")
    if "cython" in available_backends():
        for r in rows:
            if "python" in r and "cython" in r:
                r["speedup"] = r["python"] / r["cython"]
        print("speedup (python / cython, unpacked):", ", ".join(f"{r['speedup']:.1f}x" for r in rows if "speedup" in r))
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
