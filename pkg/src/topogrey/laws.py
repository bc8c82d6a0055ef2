"""Named property suites over seeded random instances, with greedy shrinking.

``check_laws(suite, seed, count)`` runs ``count`` instances of a suite and
returns a JSON-ready report.  Instance ``i`` draws from its own
``random.Random(f"{suite}:{seed}:{i}")``, so results do not depend on pool
scheduling.  A failing instance is shrunk by greedy deletion before it is
reported.
"""

from __future__ import annotations

import itertools
import math
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator

from . import generators as gen
from .errors import TopogreyError
from .finmetric import FinMetricSpace, find_isometry
from .greycore import (
    ONE,
    ZERO,
    GreyRelation,
    GreySet,
    fmt_rational,
    grey_add,
    parse_rational,
    intersection,
    map_image,
    pseudometric_check,
    rel_compose,
    rel_image,
    rel_inverse,
    saturate,
    sublevel,
    trunc_add,
    trunc_sub,
    union,
)
from .groupoid.core import FinGroupoid, generated_subgroupoid, induced_subgroupoid, orbits, restrict
from .groupoid.cosets import coset_space, right_mult_map
from .groupoid.structures import uniformize, verify_uniformization
from .groupoid.yoneda import verify_eta_iso
from .greygroupoid import (
    Filtration,
    birkhoff_kakutani,
    check_norm,
    close_under_sum,
    closure_oracle,
    coset_metric_space,
    crisp,
    grey_closure,
    grey_conv,
    grey_inv,
    level_norm,
    metric_yoneda_check,
    norm_metric_bijection,
    norm_to_metric,
    on,
    right_mult_grey_relation,
    synthesize_norm,
    unit_zero_set,
)
from .katetov import (
    delta_embed,
    density_witness,
    exact_extension,
    extension_property_check,
    is_katetov,
    iter_katetov,
    katetov_distance,
    tower_map,
    urysohn_approx,
)

Failure = tuple  # (law, witness)


@dataclass(frozen=True)
class Suite:
    name: str
    generate: Callable[[random.Random], Any]
    check: Callable[[Any], tuple[list, dict]]
    shrink: Callable[[Any], Iterable[Any]] | None = None
    witness: Callable[[Any], Any] | None = None


def _names(G: FinGroupoid, ms: Iterable[int]) -> list[str]:
    return sorted(str(G.names[g]) for g in ms)


# -- grey algebra ---------------------------------------------------------------------------------


def sublevel_sum_union(A: GreySet, B: GreySet, r: Fraction) -> frozenset:
    """``⋃ {A_{<s} ∩ B_{<t} : s + t ≤ r}`` over a grid fine enough to be exact.

    With ``L`` the common denominator of all values and ``r``, the grid of
    step ``1/(2L)`` already realizes every sublevel pair; it is enough to
    try, for each side, the least grid point above each attained value.
    """
    dens = [v.denominator for v in itertools.chain(A.values.values(), B.values.values())] + [r.denominator]
    step = Fraction(1, 2 * math.lcm(*dens))
    reps_a = sorted({ZERO} | {a + step for a in A.values.values()})
    reps_b = sorted({ZERO} | {b + step for b in B.values.values()})
    out: set = set()
    for s in reps_a:
        for t in reps_b:
            if s + t <= r:
                out |= sublevel(A, s) & sublevel(B, t)
    return frozenset(out)


def sublevel_sum_union_grid(A: GreySet, B: GreySet, r: Fraction, den: int) -> frozenset:
    """Reference: every pair ``(s, t)`` on the grid ``k/den`` in ``[0, 1]``."""
    grid = [Fraction(k, den) for k in range(den + 1)]
    out: set = set()
    for s in grid:
        for t in grid:
            if s + t <= r:
                out |= sublevel(A, s) & sublevel(B, t)
    return frozenset(out)


def _gen_grey_algebra(rng: random.Random):
    sizes = [rng.randint(1, 4) for _ in range(4)]
    X, Y, Z, W = ([f"{c}{i}" for i in range(n)] for c, n in zip("xyzw", sizes))
    return {
        "R": gen.random_relation(rng, X, Y),
        "S": gen.random_relation(rng, Y, Z),
        "T": gen.random_relation(rng, Z, W),
        "A": gen.random_greyset(rng, X),
        "B": gen.random_greyset(rng, X),
        "r": gen.random_fraction(rng),
        "d": gen.random_metric_space(rng, sizes[0], rng.randint(1, 8), names=X, pseudo=True),
        "C": gen.random_greyset(rng, X),
        "vals": [gen.random_fraction(rng) for _ in range(3)],
    }


def _check_grey_algebra(inst) -> tuple[list, dict]:
    R, S, T, A, B, r, d = (inst[k] for k in "RSTABrd")
    fails: list = []
    if rel_compose(T, rel_compose(S, R)) != rel_compose(rel_compose(T, S), R):
        fails.append(("composition is associative", None))
    dX, dY = GreyRelation.diagonal(R.source), GreyRelation.diagonal(R.target)
    if rel_compose(R, dX) != R or rel_compose(dY, R) != R:
        fails.append(("diagonal is a two-sided identity", None))
    if rel_inverse(rel_compose(S, R)) != rel_compose(rel_inverse(R), rel_inverse(S)):
        fails.append(("inverse reverses composition", None))
    point = GreyRelation.from_function(("*",), R.source, lambda _, x: A(x))
    via_compose = rel_compose(R, point)
    if rel_image(R, A) != GreySet(R.target, {y: via_compose("*", y) for y in R.target}):
        fails.append(("relational image is composition with a point", None))
    lhs = sublevel(grey_add(A, B), r)
    if lhs != sublevel_sum_union(A, B, r):
        fails.append(("sublevel of a sum decomposes", fmt_rational(r)))
    pseudometric_check(d).raise_if_failed(AssertionError)
    C = inst["C"]
    once = saturate(d, C)
    if saturate(d, once) != once:
        fails.append(("saturation is idempotent", None))
    if not all(once(x) <= C(x) for x in d.source):
        fails.append(("saturation lies below", None))
    if rel_compose(d, d) != d:
        fails.append(("pseudometric composes to itself", None))
    p, q, s = inst["vals"]
    if trunc_add(p, trunc_add(q, s)) != trunc_add(trunc_add(p, q), s) or trunc_add(p, q) != trunc_add(q, p):
        fails.append(("truncated addition is a commutative monoid", (fmt_rational(p), fmt_rational(q), fmt_rational(s))))
    if trunc_sub(trunc_add(p, q), q) > p or (p + q <= 1 and trunc_sub(trunc_add(p, q), q) != p):
        fails.append(("truncated subtraction undoes addition", (fmt_rational(p), fmt_rational(q))))
    return fails, {"points": len(R.source) + len(R.target)}


# -- grey convolution on groupoids --------------------------------------------------------------


def conv_skip_units(G: FinGroupoid, A: GreySet, B: GreySet) -> GreySet:
    """Planted bug for the harness self-test: ignores factorizations through a left unit."""
    out = [ONE] * len(G)
    for h in G.morphisms:
        if G.is_unit(h):
            continue
        for k in G.morphisms:
            c = G.table[h][k]
            if c is not None:
                out[c] = min(out[c], trunc_add(A(h), B(k)))
    return on(G, out)


MUTATIONS = {"conv-skip-units": conv_skip_units}


@dataclass(frozen=True)
class ConvInstance:
    G: FinGroupoid
    A: GreySet
    B: GreySet
    C: GreySet


def _gen_conv(rng: random.Random) -> ConvInstance:
    G = gen.random_groupoid(rng, max_morphisms=10)
    A, B, C = (gen.random_greyset(rng, tuple(G.morphisms), max_den=4, p_one=0.4) for _ in range(3))
    return ConvInstance(G, A, B, C)


def conv_checker(conv):
    def check(inst: ConvInstance) -> tuple[list, dict]:
        G, A, B, C = inst.G, inst.A, inst.B, inst.C
        fails = []
        E = crisp(G, G.objects)
        if conv(G, E, A) != A or conv(G, A, E) != A:
            fails.append(("units are a two-sided identity", None))
        if conv(G, conv(G, A, B), C) != conv(G, A, conv(G, B, C)):
            fails.append(("convolution is associative", None))
        if grey_inv(G, conv(G, A, B)) != conv(G, grey_inv(G, B), grey_inv(G, A)):
            fails.append(("inversion reverses convolution", None))
        return fails, {"morphisms": len(G)}

    return check


def _shrink_conv(inst: ConvInstance) -> Iterator[ConvInstance]:
    G = inst.G
    comps = orbits(G)
    if len(comps) > 1:
        for comp in comps:
            H, keep = induced_subgroupoid(G, comp)
            yield ConvInstance(H, *(on(H, [X(g) for g in keep]) for X in (inst.A, inst.B, inst.C)))
    small = sorted({generated_subgroupoid(G, [g]) for g in G.morphisms}, key=lambda S: (len(S), sorted(S)))
    for S in small:
        if len(S) < len(G):
            H, keep = restrict(G, S)
            yield ConvInstance(H, *(on(H, [X(g) for g in keep]) for X in (inst.A, inst.B, inst.C)))
    for which in ("A", "B", "C"):
        X = getattr(inst, which)
        for g in G.morphisms:
            x = G.tgt[g]
            if X(g) != ONE and not G.is_unit(g) and X(x) == ONE:
                # move the value onto a unit: fewer non-unit values, so shrinking terminates
                Y = on(G, [X(g) if k == x else ONE if k == g else X(k) for k in G.morphisms])
                yield ConvInstance(**{**inst.__dict__, which: Y})
    for which in ("C", "B", "A"):
        X = getattr(inst, which)
        for g in G.morphisms:
            if X(g) != ONE:
                Y = on(G, [ONE if k == g else X(k) for k in G.morphisms])
                yield ConvInstance(**{**inst.__dict__, which: Y})


def _conv_witness(inst: ConvInstance) -> dict:
    G = inst.G
    support = {g for X in (inst.A, inst.B, inst.C) for g in G.morphisms if X(g) != ONE}

    def values(X):
        return {str(G.names[g]): fmt_rational(X(g)) for g in sorted(support) if X(g) != ONE}

    return {
        "morphisms": _names(G, support),
        "A": values(inst.A),
        "B": values(inst.B),
        "C": values(inst.C),
        "groupoid": G.to_json(),
    }


def conv_instance_from_witness(w: dict) -> ConvInstance:
    """Rebuild a shrunk convolution counterexample from its report entry."""
    G = FinGroupoid.from_json(w["groupoid"])

    def grey(vals):
        return on(G, {g: parse_rational(vals[str(G.names[g])]) if str(G.names[g]) in vals else ONE for g in G.morphisms})

    return ConvInstance(G, grey(w["A"]), grey(w["B"]), grey(w["C"]))


# -- Katětov ------------------------------------------------------------------------------------


def _gen_space(rng: random.Random, max_points: int):
    q = rng.randint(1, 4)
    n = rng.randint(1, max_points)
    return gen.random_metric_space(rng, n, q), q


def _check_enriched_yoneda(inst) -> tuple[list, dict]:
    X, q = inst
    fails = []
    count = 0
    for u in iter_katetov(X, q):
        count += 1
        for x in X.points:
            if katetov_distance(delta_embed(X, x), u) != u(x):
                fails.append(("distance from a point equals the prescribed value", (x, [fmt_rational(v) for v in u.values])))
    for x, y in itertools.combinations(X.points, 2):
        if katetov_distance(delta_embed(X, x), delta_embed(X, y)) != X.d(x, y):
            fails.append(("point embedding is isometric", (x, y)))
    return fails, {"points": len(X), "functions": count}


def _gen_density(rng: random.Random):
    Z, q = _gen_space(rng, 6)
    pts = list(Z.points)
    X = rng.sample(pts, rng.randint(1, len(pts)))
    Y = rng.sample(pts, rng.randint(1, len(pts)))
    return Z, q, sorted(X), sorted(Y)


def _check_density(inst) -> tuple[list, dict]:
    Z, q, X, Y = inst
    SX, SY = Z.subspace(X), Z.subspace(Y)
    fails, count, worst = [], 0, ZERO
    for u in iter_katetov(SX, q):
        count += 1
        v, gap, bound = density_witness(u, SY, Z)
        if not is_katetov(v):
            fails.append(("restriction is Katětov", [fmt_rational(a) for a in u.values]))
        if gap > bound:
            fails.append(("sup distance at most twice the Hausdorff distance", [fmt_rational(a) for a in u.values]))
        worst = max(worst, gap)
    return fails, {"functions": count, "max_gap": fmt_rational(worst)}


def check_urysohn(q: int, depth: int, seed_names=("a", "b")) -> tuple[list, dict]:
    """Extension property at each level, towers over isometric seeds are
    isometric, and exact extension realizes every small ``(F, u)``."""
    seedX = FinMetricSpace([seed_names[0]], [[ZERO]])
    seedY = FinMetricSpace([seed_names[1]], [[ZERO]])
    tX, tY = urysohn_approx(seedX, q, depth), urysohn_approx(seedY, q, depth)
    fails = []
    for n in range(depth):
        v = extension_property_check(tX, n)
        if not v:
            fails.append(("extension property", (n, str(v.witness))))
    if find_isometry(tX.top, tY.top, {seed_names[0]: seed_names[1]}) is None:
        fails.append(("towers over isometric seeds are isometric", q))
    tm = tower_map({seed_names[0]: seed_names[1]}, tX, tY)
    if not all(tm.unique):
        fails.append(("level maps are unique", list(tm.unique)))
    top = tX.top
    base = tX.levels[depth - 1] if depth else top
    realized = 0
    for size in (1, 2):
        for F in itertools.combinations(base.points, size):
            for u in iter_katetov(top.subspace(F), q):
                res = exact_extension(top, list(top.points), F, u)
                if any(top.d(res.point, a) != u(a) for a in F):
                    fails.append(("exact extension realizes", (F, [fmt_rational(x) for x in u.values])))
                realized += 1
    return fails, {"sizes": [len(L) for L in tX.levels], "realized": realized}


def _gen_urysohn(rng: random.Random):
    return rng.choice([1, 2])


# -- groupoids -------------------------------------------------------------------------------------


def _gen_yoneda(rng: random.Random):
    G = gen.random_groupoid(rng)
    Us, Ss = gen.random_subgroupoid_family(rng, G)
    return G, Us, Ss


def _check_yoneda(inst) -> tuple[list, dict]:
    G, Us, Ss = inst
    rep = verify_eta_iso(G, Us, Ss)
    fails = [(f["reason"], f["witness"]) for f in rep.failures]
    homs = sum(rep.hom_counts.values())
    return fails, {"morphisms": len(G), "subgroupoids": len(Us), "homs": homs}


def _check_uniformization(M) -> tuple[list, dict]:
    fails = []
    stats = {}
    for mode in ("plain", "injective_on_objects"):
        U = uniformize(M, mode)
        rep = verify_uniformization(U)
        if not rep.full:
            fails.append(("full", mode))
        if not rep.faithful:
            fails.append(("faithful", mode))
        if not rep.orbit_reduction_injective:
            fails.append(("orbit reduction injective", mode))
        if mode == "injective_on_objects":
            if not rep.injective_on_objects:
                fails.append(("injective on objects", mode))
            if not rep.decode_round_trip:
                fails.append(("markers decode", mode))
        stats[mode] = {"N": U.N, "images": len(U.images), "isos": len(U.source)}
    return fails, stats


# -- grey norms ---------------------------------------------------------------------------------------


def _gen_bk(rng: random.Random):
    G = gen.random_groupoid(rng)
    U = gen.random_norm(rng, G) if rng.random() < 0.5 else _random_unital(rng, G)
    zero = sorted(unit_zero_set(G, U))
    units = [x for x in zero if rng.random() < 0.8] or zero[:1]
    return G, U, units, rng.randint(0, 3)


def _random_unital(rng: random.Random, G: FinGroupoid) -> GreySet:
    """Strictly unital grey set that need not be a norm."""
    zero = {x for x in G.objects if rng.random() < 0.7} or {G.objects[0]}
    vals = []
    for g in G.morphisms:
        if G.is_unit(g):
            vals.append(ZERO if g in zero else ONE)
        elif G.src[g] in zero and G.tgt[g] in zero:
            vals.append(gen.random_fraction(rng))
        else:
            vals.append(ONE)
    return on(G, vals)


def _check_bk(inst) -> tuple[list, dict]:
    G, U, units, depth = inst
    ns = synthesize_norm(G, U, units, depth)
    cert = ns.certificate
    fails = []
    if not check_norm(G, ns.norm):
        fails.append(("result is a norm", None))
    if not cert.norm_ok:
        fails.append(("inner result is a norm", cert.norm_ok.witness))
    if not (cert.units_ok and ns.units_ok):
        fails.append(("zero units match", sorted(units)))
    if not cert.half_bound_ok:
        fails.append(("at least half the level norm", cert.witnesses.get("half_bound")))
    if not cert.dominated_ok:
        fails.append(("inner result below half the target", cert.witnesses.get("dominated")))
    if not ns.dominated:
        fails.append(("result below the target", None))
    if not cert.chaining_ok:
        fails.append(("chaining bound", cert.witnesses.get("chaining")))
    Vp = level_norm(G, ns.filtration)
    if ns.inner != closure_oracle(G, Vp):
        fails.append(("closure matches the factorization oracle", None))
    return fails, {"morphisms": len(G), "levels": len(ns.filtration), "factorizations": cert.chaining_checked}


def _gen_sandwich(rng: random.Random):
    G = gen.random_groupoid(rng)
    return [gen.random_sandwich_instance(rng, G) for _ in range(6)]


def _check_sandwich(batch) -> tuple[list, dict]:
    fails = []
    pairs = 0
    for inst in batch:
        rep = right_mult_grey_relation(inst.G, inst.U, inst.V, inst.S, inst.r)
        pairs += len(rep.relation)
        for key in ("upper", "lower", "invariance"):
            if key in rep.witnesses:
                fails.append((f"sandwich {key}", rep.witnesses[key]))
    return fails, {"instances": len(batch), "pairs": pairs}


def _check_norm_metric(inst) -> tuple[list, dict]:
    G = inst
    rng = random.Random(repr(G.names))
    U = gen.random_norm(rng, G)
    fails = []
    try:
        norm_metric_bijection(G, U)
    except AssertionError as exc:
        fails.append(("norm to metric round trip", str(exc)))
    A = _random_unital(rng, G)
    if grey_closure(G, A) != closure_oracle(G, A):
        fails.append(("closure equals the repeated-convolution oracle", None))
    if not check_norm(G, grey_closure(G, A)):
        fails.append(("closure is a norm", None))
    return fails, {"morphisms": len(G)}


# -- crisp degeneration ------------------------------------------------------------------------------


def _check_crisp(inst) -> tuple[list, dict]:
    """Grey operations on {0,1} inputs against their discrete counterparts."""
    G, Us, Ss, seed = inst
    rng = random.Random(seed)
    fails = []
    ms = list(G.morphisms)
    A = frozenset(g for g in ms if rng.random() < 0.4)
    B = frozenset(g for g in ms if rng.random() < 0.4)
    if grey_conv(G, crisp(G, A), crisp(G, B)) != crisp(G, G.product(A, B)):
        fails.append(("convolution of crisp sets", _names(G, A | B)))
    if grey_inv(G, crisp(G, A)) != crisp(G, G.inverse_set(A)):
        fails.append(("inverse of a crisp set", _names(G, A)))
    gens = A | {G.src[g] for g in A} | {G.tgt[g] for g in A}
    if gens and grey_closure(G, crisp(G, gens)) != crisp(G, generated_subgroupoid(G, gens)):
        fails.append(("closure of a crisp set", _names(G, gens)))
    # greycore on zero-indicators
    X = tuple(ms)
    if union(crisp(G, A), crisp(G, B)) != crisp(G, A | B) or intersection(crisp(G, A), crisp(G, B)) != crisp(G, A & B):
        fails.append(("union and intersection of crisp sets", None))
    if sublevel(crisp(G, A), 1) != A:
        fails.append(("strict sublevel at 1 recovers the set", None))
    f = {g: G.tgt[g] for g in ms}
    if map_image(f, crisp(G, A), X) != crisp(G, {G.tgt[g] for g in A}):
        fails.append(("image of a crisp set", None))
    Rm = GreyRelation.from_function(X, X, lambda a, b: ZERO if G.table[b][a] is not None else ONE)
    Rd = {(a, b) for a in X for b in X if G.table[b][a] is not None}
    comp = {(a, c) for (a, b) in Rd for (b2, c) in Rd if b == b2}
    if rel_compose(Rm, Rm) != GreyRelation.from_function(X, X, lambda a, c: ZERO if (a, c) in comp else ONE):
        fails.append(("composition of crisp relations", None))
    for i, U in enumerate(Us):
        CU = crisp(G, U)
        if not check_norm(G, CU):
            fails.append(("crisp subgroupoid is a norm", i))
            continue
        disc = coset_space(G, U)
        met = coset_metric_space(G, CU)
        if set(disc.classes) != set(met.classes):
            fails.append(("crisp coset classes", i))
        if any(v not in (ZERO, ONE) for row in met.space.dist for v in row):
            fails.append(("crisp coset metric is discrete", i))
        d = norm_to_metric(G, CU)
        if any((d(g, h) == 0) != (disc.class_of[g] == disc.class_of[h]) for g in d.source for h in d.source):
            fails.append(("crisp norm metric is coset equality", i))
        for j, V in enumerate(Us):
            for S in Ss[j]:
                if not U <= G.product(S, G.inverse_set(S)):
                    continue
                CV = coset_space(G, V)
                table = right_mult_map(G, disc, CV, S)
                rep = right_mult_grey_relation(G, CU, crisp(G, V), S, ONE)
                mcv = coset_metric_space(G, crisp(G, V))
                cls_u = {c: disc.class_of[min(met.classes[c])] for c in range(len(met.classes))}
                cls_v = {c: CV.class_of[min(mcv.classes[c])] for c in range(len(mcv.classes))}
                for (a, b), val in rep.relation.items():
                    expect = ZERO if table[cls_u[a]] == cls_v[b] else ONE
                    if val != expect:
                        fails.append(("crisp grey right multiplication is the map", (i, j, _names(G, S))))
                        break
    norms = close_under_sum([crisp(G, U) for U in Us])
    try:
        mrep = metric_yoneda_check(G, norms)
        drep = verify_eta_iso(G, Us, Ss)
        if not (mrep.ok and drep.ok):
            fails.append(("both representations succeed", (mrep.failures[:1], drep.failures[:1])))
        for (x, y), c in mrep.counts.items():
            if c["isos"] != drep.iso_counts[(x, y)]:
                fails.append(("crisp metric isos match discrete isos", (x, y)))
    except TopogreyError as exc:
        fails.append(("crisp representation raised", str(exc)))
    units = frozenset(G.objects)
    F = Filtration((units,), units)
    W, _ = birkhoff_kakutani(G, F)
    if W != crisp(G, units):
        fails.append(("constant unit filtration gives the units norm", None))
    return fails, {"morphisms": len(G), "subgroupoids": len(Us)}


def _gen_crisp(rng: random.Random):
    G = gen.random_groupoid(rng, max_morphisms=10)
    Us, Ss = gen.random_subgroupoid_family(rng, G, extra=1)
    return G, Us, Ss, rng.random()


def _gen_metric_yoneda(rng: random.Random):
    G = gen.random_groupoid(rng, max_morphisms=8)
    norms = [crisp(G, [x]) for x in G.objects]
    norms += [gen.random_norm(rng, G, max_den=4) for _ in range(rng.randint(0, 1))]
    return G, norms


def _check_metric_yoneda(inst) -> tuple[list, dict]:
    G, norms = inst
    rep = metric_yoneda_check(G, close_under_sum(norms))
    fails = [(f["reason"], f["witness"]) for f in rep.failures]
    return fails, {"morphisms": len(G), "separation_failures": len(rep.separation_failures)}


SUITES: dict[str, Suite] = {
    s.name: s
    for s in [
        Suite("grey-algebra", _gen_grey_algebra, _check_grey_algebra),
        Suite("groupoid-convolution", _gen_conv, conv_checker(grey_conv), _shrink_conv, _conv_witness),
        Suite("enriched-yoneda", lambda rng: _gen_space(rng, 5), _check_enriched_yoneda),
        Suite("katetov-density", _gen_density, _check_density),
        Suite("urysohn", _gen_urysohn, lambda q: check_urysohn(q, 2)),
        Suite("yoneda-discrete", _gen_yoneda, _check_yoneda),
        Suite("uniformization", lambda rng: gen.random_structure_family(rng), _check_uniformization),
        Suite("birkhoff-kakutani", _gen_bk, _check_bk),
        Suite("sandwich", _gen_sandwich, _check_sandwich),
        Suite("norm-metric", lambda rng: gen.random_groupoid(rng), _check_norm_metric),
        Suite("crisp-degeneration", _gen_crisp, _check_crisp),
        Suite("yoneda-metric", _gen_metric_yoneda, _check_metric_yoneda),
    ]
}


def shrink(suite: Suite, inst, check) -> Any:
    """Greedy deletion: take the first smaller candidate that still fails, until none does."""
    if suite.shrink is None:
        return inst
    while True:
        for cand in suite.shrink(inst):
            if check(cand)[0]:
                inst = cand
                break
        else:
            return inst


def _run_one(suite: Suite, check, seed: int, i: int) -> dict:
    rng = random.Random(f"{suite.name}:{seed}:{i}")
    inst = suite.generate(rng)

    def guarded(x):
        try:
            return check(x)
        except TopogreyError as exc:
            return [("precondition", {"message": str(exc), "witness": repr(exc.witness)})], {}

    fails, stats = guarded(inst)
    out = {"instance": i, "stats": stats, "verdict": "pass" if not fails else "fail"}
    if fails:
        small = shrink(suite, inst, guarded)
        law, wit = guarded(small)[0][0]
        out["law"] = law
        out["witness"] = suite.witness(small) if suite.witness else _jsonable(wit)
    return out


def _jsonable(x):
    if isinstance(x, Fraction):
        return fmt_rational(x)
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [_jsonable(v) for v in x]
        return sorted(items, key=repr) if isinstance(x, (set, frozenset)) else items
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    return repr(x)


def pool_size() -> int:
    try:
        return max(1, int(os.environ.get("TOPOGREY_THREADS", "1")))
    except ValueError:
        return 1


def check_laws(suite: str, seed: int = 0, count: int = 100, mutation: str | None = None) -> dict:
    """Run a suite; the report lists instances in index order."""
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}; known: {', '.join(sorted(SUITES))}")
    S = SUITES[suite]
    check = S.check
    if mutation is not None:
        if suite != "groupoid-convolution" or mutation not in MUTATIONS:
            raise KeyError(f"mutation {mutation!r} does not apply to suite {suite!r}")
        check = conv_checker(MUTATIONS[mutation])
    with ThreadPoolExecutor(max_workers=pool_size()) as pool:
        results = list(pool.map(lambda i: _run_one(S, check, seed, i), range(count)))
    failed = [r for r in results if r["verdict"] == "fail"]
    return {
        "suite": suite,
        "seed": seed,
        "count": count,
        "mutation": mutation,
        "verdict": "fail" if failed else "pass",
        "passed": count - len(failed),
        "failed": len(failed),
        "failures": failed,
        "instances": results,
    }
