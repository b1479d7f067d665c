"""Annealer wall-clock scaling across cubic grid sizes.

Times solve() on n^3 grids with the sweep schedule tied to the cell count
(m = cells/4, N_s = cells/8), so the expected cost grows like cells^2 and
each doubling of n should multiply the wall clock by ~64.

    python3 scripts/scaling_benchmark.py --sizes 8 16 --reps 2
"""

import argparse
import sys
import time

from darcysa import (
    AnnealConfig,
    BoundaryConditions,
    CovarianceSpec,
    GridSpec,
    exponentiate,
    plan_embedding,
    sample_log_field,
    solve,
)
from darcysa.runner import realization_seeds

BC = BoundaryConditions(1.0, 0.0)


def time_size(n: int, reps: int) -> float:
    g = GridSpec(n, n, n, 40.0, 40.0, 40.0)
    cells = g.n_cells
    plan = plan_embedding(CovarianceSpec(0.5, (8.0, 8.0, 8.0)), g)
    cfg = AnnealConfig(m=cells // 4, n_s=max(1, cells // 8), alpha=0.7, eps2=1e-2)

    def one(rep):
        field_seed, anneal_seed, _ = realization_seeds(0, 0, rep)
        K = exponentiate(sample_log_field(plan, field_seed))
        solve(K, g, BC, cfg, anneal_seed)

    one(0)  # warm the jit cache before timing
    t0 = time.perf_counter()
    for rep in range(reps):
        one(rep)
    return (time.perf_counter() - t0) / reps


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[8, 16])
    ap.add_argument("--reps", type=int, default=2)
    args = ap.parse_args(argv)

    times = {}
    for n in args.sizes:
        times[n] = time_size(n, args.reps)
        print(f"n = {n:3d}  cells = {n**3:7d}  {times[n]:8.3f} s/solve")
    sizes = sorted(times)
    for a, b in zip(sizes, sizes[1:]):
        ratio = times[b] / times[a]
        predicted = (b / a) ** 6
        print(f"{b}^3 / {a}^3: measured x{ratio:.1f}, cells^2 prediction x{predicted:.0f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
