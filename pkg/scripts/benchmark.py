"""Time the numeric kernels: GF(2) rank, Lambda d^2 sweeps and an uncached resolution."""
import argparse
import time

import numpy as np

from e2page import complexes as cx
from e2page import f2_linalg as f2
from e2page.ext_engine import EngineConfig, ExtEngine


def timed(label, fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    print(f"{label:40s} {time.perf_counter() - t0:8.3f}s")
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=2000, help="side of the random rank test")
    ap.add_argument("--tmax", type=int, default=40, help="sphere resolution range")
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    dense = rng.integers(0, 2, (args.size, args.size), dtype=np.uint8)
    m = f2.BitMatrix.from_dense(dense)
    small = f2.BitMatrix.from_dense(dense[:64, :64])
    f2.rank(small, m4r=True), f2.rank(small)  # compile the kernels outside the timings
    timed(f"rank {args.size}x{args.size} (M4R)", lambda: f2.rank(m, m4r=True))
    timed(f"rank {args.size}x{args.size} (plain)", lambda: f2.rank(m, m4r=False))
    timed("d^2 exhaustive, sphere, t<=24", cx.check_square_zero, cx.sphere(0), 24)
    engine = ExtEngine(EngineConfig(s_max=9, t_max=args.tmax))
    timed(f"sphere resolution s<=9 t<={args.tmax}", engine.resolution, cx.sphere(0), 9, args.tmax)


if __name__ == "__main__":
    main()
