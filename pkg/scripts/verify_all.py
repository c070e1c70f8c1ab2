"""Run every claim over the full range and write text and JSON reports.

    python3 scripts/verify_all.py --cache .cache/e2page --out reports/
"""
import argparse
import sys
from pathlib import Path

from e2page.verifier import VerifyConfig, Verifier


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cache", default=".cache/e2page")
    ap.add_argument("--out", default="reports")
    ap.add_argument("--smax", type=int, default=16)
    ap.add_argument("--tmax", type=int, default=97)
    args = ap.parse_args()
    report = Verifier(VerifyConfig(s_max=args.smax, t_max=args.tmax, cache_dir=args.cache)).run()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "verify.txt").write_text(report.to_text(True))
    (out / "verify.json").write_text(report.to_json(timings=True))
    print(report.to_text(False))
    for c in report.claims:
        print(f"{c.id:4s} {c.seconds:7.2f}s")
    sys.exit(report.exit_code(strict=True))


if __name__ == "__main__":
    main()
