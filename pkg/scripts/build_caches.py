"""Build and store the resolution caches used by the verifier and the test suite.

    python3 scripts/build_caches.py --cache .cache/e2page
"""
import argparse
import logging
import time

from e2page import complexes as cx
from e2page.ext_engine import EngineConfig, ExtEngine

# (complex, s_max, t_max); the sphere range covers every claim, the rest cover stems <= 48
TARGETS = [("sphere", 16, 97), ("C-eta-7", 9, 57), ("P7-9", 9, 57), ("P1-9", 9, 57), ("P1-inf", 9, 57)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cache", default=".cache/e2page")
    ap.add_argument("--only", default=None, help="comma-separated builtin names")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    only = set(args.only.split(",")) if args.only else None
    for name, s_max, t_max in TARGETS:
        if only and name not in only:
            continue
        engine = ExtEngine(EngineConfig(s_max=s_max, t_max=t_max, cache_dir=args.cache,
                                        keep_qi_below=70))
        t0 = time.perf_counter()
        engine.resolution(cx.builtin(name), s_max, t_max)
        print(f"{name:8s} s<={s_max:2d} t<={t_max:2d}  {time.perf_counter() - t0:7.1f}s")


if __name__ == "__main__":
    main()
