"""Report how deep a Urysohn tower must go before a level already realizes
its own small Katetov extensions.

For each q and support bound s, builds the tower over a single point level by
level and prints the level sizes together with the first level n whose
support-at-most-s Katetov functions are all realized inside level n itself.
"""

import argparse
import time

from topogrey.finmetric import FinMetricSpace
from topogrey.greycore import ZERO
from topogrey.katetov import extension_property_check, urysohn_approx


def first_closed_level(tower):
    for n in range(len(tower.levels)):
        if extension_property_check(tower, n, target_level=n):
            return n
    return None


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--support", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--budget", type=int, default=150, help="point budget per tower")
    args = ap.parse_args(argv)

    seed = FinMetricSpace(["o"], [[ZERO]])
    print(f"{'q':>2} {'s':>2}  {'sizes':<28} closed at   time")
    for q in args.q:
        for s in args.support:
            start = time.perf_counter()
            tower = urysohn_approx(seed, q, args.depth, budget=args.budget, max_support=s)
            n = first_closed_level(tower)
            sizes = [len(L) for L in tower.levels]
            note = "truncated" if tower.exhausted else ""
            closed = "-" if n is None else str(n)
            print(f"{q:>2} {s:>2}  {str(sizes):<28} {closed:<10} {time.perf_counter() - start:5.2f}s {note}")


if __name__ == "__main__":
    main()
