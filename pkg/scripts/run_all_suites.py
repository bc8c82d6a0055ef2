"""Run every law suite and print one line per suite with pass counts and time.

Exits 1 if any suite has a failing instance.  ``TOPOGREY_THREADS`` sets the
worker pool size; results do not depend on it.
"""

import argparse
import sys
import time

from topogrey import laws


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--suite", action="append", help="restrict to these suites (repeatable)")
    args = ap.parse_args(argv)
    bad = 0
    for name in args.suite or sorted(laws.SUITES):
        start = time.perf_counter()
        res = laws.check_laws(name, seed=args.seed, count=args.count)
        mark = "PASS" if res["verdict"] == "pass" else "FAIL"
        print(f"{mark} {name:<22} {res['passed']:>4}/{res['count']:<4} {time.perf_counter() - start:6.2f}s")
        for f in res["failures"][:3]:
            print(f"     instance {f['instance']}: {f['law']}")
        bad += mark == "FAIL"
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
