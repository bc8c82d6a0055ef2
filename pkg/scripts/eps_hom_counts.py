"""Count maps between canonical metric structures that are homomorphisms up
to an additive slack eps, for a few small groupoids and norm families.

At eps = 0 the count is the number of exact homomorphisms; as eps grows the
constraint loosens until every sort-respecting map qualifies.  Nothing is
asserted; the table is for looking at how fast the count grows.
"""

import argparse
from fractions import Fraction

from topogrey.errors import BudgetExhausted
from topogrey.generators import SMALL_GROUPS
from topogrey.greygroupoid import close_under_sum, count_eps_homs, crisp, metric_canonical_structure, on, units_norm
from topogrey.groupoid import cyclic_group, pair_groupoid

EPS = [Fraction(0), Fraction(1, 8), Fraction(1, 4), Fraction(1, 2), Fraction(1)]


def examples():
    Z4 = cyclic_group(4)
    yield "Z4, levels (0,1,1/2,1)", Z4, [units_norm(Z4), on(Z4, [0, 1, Fraction(1, 2), 1])]
    Z6 = cyclic_group(6)
    yield "Z6, word-style norm", Z6, [units_norm(Z6), on(Z6, [0, Fraction(1, 3), Fraction(2, 3), 1, Fraction(2, 3), Fraction(1, 3)])]
    P = pair_groupoid(2, SMALL_GROUPS["Z2"])
    yield "pair(2) x Z2, per-object units", P, [crisp(P, {x}) for x in P.objects]


def count(MF, x, eps, budget):
    try:
        return str(count_eps_homs(MF, x, x, eps, budget=budget))
    except BudgetExhausted:
        return f">{budget}"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--budget", type=int, default=5000, help="stop counting past this many maps")
    args = ap.parse_args(argv)
    print("example".ljust(32) + "".join(f"eps={e}".rjust(10) for e in EPS))
    for label, G, norms in examples():
        MF = metric_canonical_structure(G, close_under_sum(norms))
        x = G.objects[0]
        print(label.ljust(32) + "".join(count(MF, x, e, args.budget).rjust(10) for e in EPS))


if __name__ == "__main__":
    main()
