"""Seeded random instances for the property suites.

Every generator takes a :class:`random.Random` and is deterministic given
its state.  Instances are small enough for exhaustive checking.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .finmetric import FinMetricSpace
from .greycore import ONE, ZERO, GreyRelation, GreySet
from .groupoid.core import (
    FinGroupoid,
    disjoint_union,
    generated_subgroupoid,
    group_groupoid,
    pair_groupoid,
    relabel,
)
from .groupoid.cosets import coset_space
from .groupoid.structures import DiscreteStructureFamily
from .greygroupoid.norms import crisp, grey_closure, grey_conv, grey_inv, grey_max, on, unit_zero_set

# -- groups ------------------------------------------------------------------------------------


def _table_from_elements(elements: Sequence, mul) -> list[list[int]]:
    index = {e: i for i, e in enumerate(elements)}
    return [[index[mul(a, b)] for b in elements] for a in elements]


def _perm_group(gens: Sequence[tuple]) -> list[list[int]]:
    n = len(gens[0])
    ident = tuple(range(n))
    elems = [ident]
    frontier = [ident]
    while frontier:
        new = []
        for a in frontier:
            for g in gens:
                c = tuple(a[g[i]] for i in range(n))
                if c not in elems:
                    elems.append(c)
                    new.append(c)
        frontier = new
    return _table_from_elements(elems, lambda a, b: tuple(a[b[i]] for i in range(n)))


def _direct_product(A: list[list[int]], B: list[list[int]]) -> list[list[int]]:
    pairs = [(a, b) for a in range(len(A)) for b in range(len(B))]
    return _table_from_elements(pairs, lambda p, q: (A[p[0]][q[0]], B[p[1]][q[1]]))


def _cyclic(k: int) -> list[list[int]]:
    return [[(a + b) % k for b in range(k)] for a in range(k)]


def _quaternion() -> list[list[int]]:
    # units ±1, ±i, ±j, ±k as (sign, letter)
    letters = "1ijk"
    prod = {
        ("1", x): (1, x) for x in letters
    } | {(x, "1"): (1, x) for x in letters} | {
        ("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
        ("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
        ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j"),
    }
    elems = [(s, x) for x in letters for s in (1, -1)]

    def mul(a, b):
        s, x = prod[(a[1], b[1])]
        return (a[0] * b[0] * s, x)

    return _table_from_elements(elems, mul)


SMALL_GROUPS = {
    "1": _cyclic(1),
    "Z2": _cyclic(2),
    "Z3": _cyclic(3),
    "Z4": _cyclic(4),
    "V4": _direct_product(_cyclic(2), _cyclic(2)),
    "Z5": _cyclic(5),
    "Z6": _cyclic(6),
    "S3": _perm_group([(1, 0, 2), (1, 2, 0)]),
    "Z7": _cyclic(7),
    "Z8": _cyclic(8),
    "D4": _perm_group([(1, 2, 3, 0), (0, 3, 2, 1)]),
    "Q8": _quaternion(),
    "Z4xZ2": _direct_product(_cyclic(4), _cyclic(2)),
    "Z2^3": _direct_product(_direct_product(_cyclic(2), _cyclic(2)), _cyclic(2)),
}


def random_group(rng: random.Random, max_order: int = 8) -> FinGroupoid:
    name = rng.choice(sorted(k for k, t in SMALL_GROUPS.items() if len(t) <= max_order))
    return group_groupoid(SMALL_GROUPS[name])


def random_groupoid(rng: random.Random, max_morphisms: int = 12, shuffle: bool = True) -> FinGroupoid:
    """Disjoint union of ``pair(n) × H`` blocks, morphisms shuffled."""
    parts = []
    budget = max_morphisms
    while budget > 0 and (not parts or rng.random() < 0.5):
        options = [
            (n, name) for n in (1, 2, 3) for name, t in SMALL_GROUPS.items()
            if n * n * len(t) <= budget
        ]
        if not options:
            break
        n, name = rng.choice(sorted(options))
        parts.append(pair_groupoid(n, SMALL_GROUPS[name]))
        budget -= n * n * len(SMALL_GROUPS[name])
    G = parts[0] if len(parts) == 1 else disjoint_union(*parts)
    if shuffle:
        perm = list(G.morphisms)
        rng.shuffle(perm)
        G = relabel(G, perm)
    return G


# -- admissible subgroupoid families -----------------------------------------------------------


def random_subgroupoid_family(rng: random.Random, G: FinGroupoid, extra: int = 2):
    """Per-object unit subgroupoids (with all their cosets as sections), plus a
    few random generated subgroupoids.  Every coset is a section, so sections
    form a basis of each quotient; random unions of cosets with distinct
    targets are added on top."""
    Us: list = []
    Ss: list = []
    for x in G.objects:
        Us.append(frozenset([x]))
        Ss.append([frozenset([x])] + [frozenset([g]) for g in G.morphisms if G.src[g] == x and g != x])
    for _ in range(rng.randint(0, extra)):
        gens = rng.sample(list(G.morphisms), rng.randint(1, min(2, len(G))))
        U = generated_subgroupoid(G, gens)
        if U in Us:
            continue
        C = coset_space(G, U)
        secs = [U] + [c for c in C.classes if c != U]
        for _ in range(rng.randint(0, 3)):
            picks = {}
            for c in rng.sample(range(len(C.classes)), rng.randint(1, len(C.classes))):
                picks.setdefault(C.tau[c], c)
            S = frozenset().union(*(C.classes[c] for c in picks.values()))
            if S not in secs:
                secs.append(S)
        Us.append(U)
        Ss.append(secs)
    return Us, Ss


# -- grey data ----------------------------------------------------------------------------------


def random_fraction(rng: random.Random, max_den: int = 8) -> Fraction:
    q = rng.randint(1, max_den)
    return Fraction(rng.randint(0, q), q)


def random_greyset(rng: random.Random, carrier: Sequence, max_den: int = 8, p_one: float = 0.25) -> GreySet:
    return GreySet(tuple(carrier), {x: ONE if rng.random() < p_one else random_fraction(rng, max_den) for x in carrier})


def random_relation(rng: random.Random, source: Sequence, target: Sequence, max_den: int = 8) -> GreyRelation:
    return GreyRelation.from_function(tuple(source), tuple(target), lambda a, b: random_fraction(rng, max_den))


def floyd_warshall(points: Sequence, weights: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(points)
    d = [row[:] for row in weights]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def random_metric_space(
    rng: random.Random, n: int, q: int, names: Sequence | None = None, pseudo: bool = False
) -> FinMetricSpace:
    """Symmetric random ``k/q`` weights closed under shortest paths."""
    names = tuple(names or "abcdefghij"[:n])
    lo = 0 if pseudo else 1
    w = [[ZERO] * n for _ in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        w[i][j] = w[j][i] = Fraction(rng.randint(lo, q), q)
    d = floyd_warshall(names, w)
    if pseudo:
        return GreyRelation.from_function(names, names, lambda a, b: d[names.index(a)][names.index(b)])
    return FinMetricSpace(names, d)


def random_pseudometric(rng: random.Random, n: int, q: int) -> GreyRelation:
    return random_metric_space(rng, n, q, pseudo=True)


# -- norms ------------------------------------------------------------------------------------------


def random_norm(rng: random.Random, G: FinGroupoid, max_den: int = 8, zero_units=None) -> GreySet:
    """Closure of a random strictly unital grey set."""
    objs = list(G.objects)
    if zero_units is None:
        zero_units = frozenset(x for x in objs if rng.random() < 0.7) or frozenset([rng.choice(objs)])
    zero_units = frozenset(zero_units)
    vals = []
    for g in G.morphisms:
        if G.is_unit(g):
            vals.append(ZERO if g in zero_units else ONE)
        elif G.src[g] in zero_units and G.tgt[g] in zero_units and rng.random() < 0.8:
            vals.append(random_fraction(rng, max_den))
        else:
            vals.append(ONE)
    return grey_closure(G, on(G, vals))


@dataclass(frozen=True)
class SandwichInstance:
    G: FinGroupoid
    U: GreySet
    V: GreySet
    S: frozenset
    r: Fraction


def random_sandwich_instance(rng: random.Random, G: FinGroupoid, max_den: int = 8) -> SandwichInstance:
    """An admissible ``(U, V, S, r)``: S is V_{<r}-small inside σ⁻¹(V_{=0}) and
    U is a norm above ``S⊙V⊙S⁻¹``."""
    V = random_norm(rng, G, max_den)
    dom = [g for g in G.morphisms if V(G.src[g]) == 0]
    S: list = [rng.choice(dom)]
    for g in rng.sample(dom, len(dom)):
        if g in S or rng.random() < 0.5:
            continue
        if all((c := G.table[G.inv[s]][g]) is None or V(c) < 1 for s in S):
            S.append(g)
    S = frozenset(S)
    radius = max(V(c) for s in S for t in S if (c := G.table[G.inv[s]][t]) is not None)
    r = min(ONE, radius + Fraction(rng.randint(1, 4), 8))
    zS = crisp(G, S)
    T = grey_conv(G, grey_conv(G, zS, V), grey_inv(G, zS))
    candidates = [x for x in unit_zero_set(G, T)]
    Z = frozenset(x for x in candidates if rng.random() < 0.7) or frozenset([rng.choice(candidates)])
    base = crisp(G, Z)
    U = base
    for _ in range(4):
        W = grey_max(base, random_norm(rng, G, max_den, zero_units=Z))
        if all(W(g) >= T(g) for g in G.morphisms):
            U = W
            break
    return SandwichInstance(G, U, V, S, r)


# -- structure families ----------------------------------------------------------------------


def random_structure_family(rng: random.Random, max_points: int = 4, max_fibers: int = 3) -> DiscreteStructureFamily:
    """One sort, a binary relation ``R``, a unary ``P`` and sometimes a unary function ``f``.

    Some fibers are relabelled copies of others so that isomorphisms exist.
    """
    nfib = rng.randint(1, max_fibers)
    with_fn = rng.random() < 0.4
    fibers, rels_R, rels_P, fns = {}, {}, {}, {}
    base = tuple(f"x{i}" for i in range(nfib))
    for i, x in enumerate(base):
        if i and rng.random() < 0.5:
            src = base[rng.randrange(i)]
            elems = fibers[src]["s"]
            perm = list(elems)
            rng.shuffle(perm)
            m = dict(zip(elems, perm))
            fibers[x] = {"s": elems}
            rels_R[x] = frozenset((m[a], m[b]) for a, b in rels_R[src])
            rels_P[x] = frozenset((m[a],) for (a,) in rels_P[src])
            if with_fn:
                fns[x] = {(m[a],): m[v] for (a,), v in fns[src].items()}
            continue
        n = rng.randint(1, max_points)
        elems = tuple(range(n))
        fibers[x] = {"s": elems}
        rels_R[x] = frozenset((a, b) for a in elems for b in elems if rng.random() < 0.3)
        rels_P[x] = frozenset((a,) for a in elems if rng.random() < 0.4)
        if with_fn:
            fns[x] = {(a,): rng.choice(elems) for a in elems}
    fn_sorts = {"f": (("s",), "s")} if with_fn else {}
    return DiscreteStructureFamily(
        base,
        ("s",),
        fibers,
        {"R": ("s", "s"), "P": ("s",)},
        {"R": rels_R, "P": rels_P},
        fn_sorts,
        {"f": fns} if with_fn else {},
    )
