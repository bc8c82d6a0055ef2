"""Coset pseudometric spaces of norms, grey right multiplication, and the
canonical metric structure with its Yoneda verification.

Completions are finite quotients here: no points are added.  Coset spaces
are stored as a single :class:`FinMetricSpace` in which points over
different objects sit at distance 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ..errors import BudgetExhausted, InsufficientBasis, PreconditionError, Verdict
from ..finmetric import FinMetricSpace
from ..greycore import ONE, ZERO, GreySet, metric_quotient, trunc_sub
from ..groupoid.core import FinGroupoid
from .norms import check_norm, crisp, grey_conv, grey_inv, grey_sum, norm_domain, norm_to_metric, unit_zero_set


@dataclass(frozen=True)
class CosetMetricSpace:
    """``Ĝ/U``: classes of ``σ⁻¹(U_{=0})`` with the induced metric.

    ``classes[c]`` lists member morphisms; ``space`` names classes by their
    least member; ``tau[c]`` is the common target.
    """

    G: FinGroupoid
    U: GreySet
    classes: tuple
    class_of: Mapping
    space: FinMetricSpace
    tau: tuple
    unit_section: Mapping

    def fiber(self, x: int) -> tuple:
        return tuple(c for c, t in enumerate(self.tau) if t == x)

    def d(self, a: int, b: int) -> Fraction:
        return self.space.dist[a][b]

    def act(self, k: int, c: int) -> int:
        return self.class_of[self.G.mul(k, min(self.classes[c]))]


def coset_metric_space(G: FinGroupoid, U: GreySet) -> CosetMetricSpace:
    dU = norm_to_metric(G, U)
    space, proj = metric_quotient(dU)
    reps = list(space.points)
    index = {r: i for i, r in enumerate(reps)}
    class_of = {g: index[proj[g]] for g in dU.source}
    members: list = [[] for _ in reps]
    for g, c in class_of.items():
        members[c].append(g)
    classes = tuple(frozenset(m) for m in members)
    tau = tuple(G.tgt[r] for r in reps)
    unit_section = {x: class_of[x] for x in sorted(unit_zero_set(G, U))}
    C = CosetMetricSpace(G, U, classes, class_of, space, tau, unit_section)
    for c in range(len(classes)):
        for k in G.morphisms:
            if G.src[k] != tau[c]:
                continue
            if len({class_of[G.mul(k, g)] for g in classes[c]}) != 1:
                raise AssertionError("left action does not descend to the quotient")
            for c2 in range(len(classes)):
                if tau[c2] == tau[c] and C.d(C.act(k, c), C.act(k, c2)) != C.d(c, c2):
                    raise AssertionError("left action is not isometric")
    return C


# -- grey right multiplication -------------------------------------------------------------------


@dataclass
class SandwichReport:
    relation: dict                 # (class of G/U, class of G/V) -> value, same-fiber pairs
    upper_ok: bool
    lower_ok: bool
    invariant_ok: bool
    r: Fraction
    witnesses: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.upper_ok and self.lower_ok and self.invariant_ok


def check_small(G: FinGroupoid, V: GreySet, S: Iterable[int], r: Fraction) -> Verdict:
    """``S ⊆ σ⁻¹(V_{=0})`` and ``S⁻¹·S ⊆ V_{<r}``."""
    S = sorted(set(S))
    zero_units = unit_zero_set(G, V)
    for s in S:
        if G.src[s] not in zero_units:
            return Verdict.reject("S leaves the domain of V", (G.names[s],))
    for s in S:
        for t in S:
            c = G.table[G.inv[s]][t]
            if c is not None and not V(c) < r:
                return Verdict.reject("S is not small", (G.names[s], G.names[t]))
    return Verdict.accept()


def right_mult_grey_relation(
    G: FinGroupoid,
    U: GreySet,
    V: GreySet,
    S: Iterable[int],
    r,
    CU: CosetMetricSpace | None = None,
    CV: CosetMetricSpace | None = None,
) -> SandwichReport:
    """``R(πg, πh) = (U⊙S⊙V)(g⁻¹h)`` with both sandwich inequalities checked exactly:
    ``d_V(g·S, h) ≥ R ≥ d_V(g·S, h) ∸ r``.

    Preconditions: ``S ⊆ σ⁻¹(V_{=0})`` is ``V_{<r}``-small and
    ``U ⊑ S⊙V⊙S⁻¹`` (pointwise ``U ≥ S⊙V⊙S⁻¹``).
    """
    r = Fraction(r)
    if not 0 < r <= 1:
        raise PreconditionError("r must lie in (0, 1]", r)
    check_norm(G, U).raise_if_failed()
    check_norm(G, V).raise_if_failed()
    S = frozenset(S)
    check_small(G, V, S, r).raise_if_failed()
    zS = crisp(G, S)
    SV = grey_conv(G, zS, V)
    SVS = grey_conv(G, SV, grey_inv(G, zS))
    for g in G.morphisms:
        if U(g) < SVS(g):
            raise PreconditionError("U is not below S⊙V⊙S⁻¹", G.names[g])
    USV = grey_conv(G, U, SV)
    CU = CU or coset_metric_space(G, U)
    CV = CV or coset_metric_space(G, V)

    rel: dict = {}
    wit: dict = {}
    invariant = upper = lower = True
    for g in sorted(CU.class_of):
        a = CU.class_of[g]
        for h in sorted(CV.class_of):
            if G.tgt[h] != G.tgt[g]:
                continue
            b = CV.class_of[h]
            k = G.mul(G.inv[g], h)
            val = USV(k)
            if (a, b) in rel and rel[(a, b)] != val:
                invariant = False
                wit.setdefault("invariance", (G.names[g], G.names[h]))
            rel.setdefault((a, b), val)
            dist = SV(k)        # d_V(g·S, h)
            if val > dist:
                upper = False
                wit.setdefault("upper", (G.names[g], G.names[h]))
            if val < trunc_sub(dist, r):
                lower = False
                wit.setdefault("lower", (G.names[g], G.names[h]))
    return SandwichReport(rel, upper, lower, invariant, r, wit)


def smallness_radius(G: FinGroupoid, V: GreySet, S: Iterable[int]) -> Fraction:
    """Largest ``V(s⁻¹t)`` over composable pairs in S."""
    S = sorted(set(S))
    vals = [V(c) for s in S for t in S if (c := G.table[G.inv[s]][t]) is not None]
    return max(vals, default=ZERO)


# -- the canonical metric structure ----------------------------------------------------------------


@dataclass(frozen=True)
class MetricStructureFamily:
    """Fibers of coset metric spaces and grey relations between sorts.

    ``relations[(i, j, k)][(a, b)]`` for ``a`` in sort i and ``b`` in sort j
    over the same object.
    """

    G: FinGroupoid
    norms: tuple
    sections: tuple
    cosets: tuple
    relations: Mapping
    sandwich: Mapping

    def containing(self, x: int) -> list[int]:
        return [i for i, U in enumerate(self.norms) if U(x) == 0]


def close_under_sum(norms: Sequence[GreySet]) -> list[GreySet]:
    """Smallest list containing ``norms`` and closed under pointwise ``+̇``."""
    out: list = []
    for U in norms:
        if U not in out:
            out.append(U)
    grew = True
    while grew:
        grew = False
        for A, B in itertools.product(list(out), repeat=2):
            C = grey_sum(A, B)
            if C not in out:
                out.append(C)
                grew = True
    return out


def separation_failures(G: FinGroupoid, norms: Sequence[GreySet]) -> list[tuple]:
    """Distinct parallel morphisms that no norm at their source tells apart."""
    bad = []
    for x in G.objects:
        at_x = [U for U in norms if U(x) == 0]
        for y in G.objects:
            for g, h in itertools.combinations(G.hom(x, y), 2):
                k = G.mul(G.inv[g], h)
                if all(U(k) == 0 for U in at_x):
                    bad.append((g, h))
    return bad


def metric_canonical_structure(
    G: FinGroupoid,
    norms: Sequence[GreySet],
    sections: Sequence[Iterable[int]] | None = None,
) -> MetricStructureFamily:
    """Sorts ``Ĝ/U`` and relations ``R̂_{U,V,U⊙S⊙V}`` for admissible ``S``.

    ``sections`` is one global family of morphism sets (default: all
    singletons); ``S`` is admissible for ``(U, V)`` when it lies in
    ``σ⁻¹(V_{=0})``, is ``V_{<1}``-small, and ``U ⊑ S⊙V⊙S⁻¹``.  Raises
    ``InsufficientBasis`` with ``(g, r)`` when some morphism lacks a
    ``U_{<r}``-small section for a realized distance ``r``.
    """
    norms = tuple(norms)
    for i, U in enumerate(norms):
        v = check_norm(G, U)
        if not v:
            raise PreconditionError(f"norm {i}: {v.reason}", v.witness)
    for A, B in itertools.product(norms, repeat=2):
        if grey_sum(A, B) not in norms:
            raise PreconditionError("norm family is not closed under +̇", ())
    secs = tuple(frozenset(S) for S in (sections if sections is not None else [[g] for g in G.morphisms]))
    radii: set = set()
    for U in norms:
        dom = norm_domain(G, U)
        radii |= {U(G.mul(G.inv[g], h)) for g in dom for h in dom if G.tgt[g] == G.tgt[h]}
    radii = sorted(radii - {ZERO})
    for U in norms:
        for g in norm_domain(G, U):
            for r in radii:
                if not any(g in S and check_small(G, U, S, r) for S in secs):
                    raise InsufficientBasis("no small section around a morphism", (G.names[g], r))
    cosets = tuple(coset_metric_space(G, U) for U in norms)
    relations, sandwich = {}, {}
    for (i, U), (j, V) in itertools.product(enumerate(norms), repeat=2):
        for k, S in enumerate(secs):
            if not check_small(G, V, S, ONE):
                continue
            try:
                rep = right_mult_grey_relation(G, U, V, S, ONE, cosets[i], cosets[j])
            except PreconditionError:
                continue
            if not rep.invariant_ok:
                raise AssertionError("grey right multiplication does not descend")
            relations[(i, j, k)] = rep.relation
            sandwich[(i, j, k)] = rep
    return MetricStructureFamily(G, norms, secs, cosets, relations, sandwich)


def _iter_metric_homs(MF: MetricStructureFamily, x: int, y: int, iso: bool, slack=ZERO, budget=None):
    """Sort-wise maps ``M_x -> M_y``: Lipschitz and relation-nonincreasing (within slack).

    With ``iso`` the maps must be bijective isometries preserving every
    relation exactly.
    """
    cos = MF.cosets
    n = len(cos)
    fx = [c.fiber(x) for c in cos]
    fy = [c.fiber(y) for c in cos]
    if iso and any(len(a) != len(b) for a, b in zip(fx, fy)):
        return
    slots = [(i, a) for i in range(n) for a in fx[i]]
    rels_by_pair: dict = {}
    for (i, j, k), table in MF.relations.items():
        rels_by_pair.setdefault((i, j), []).append(table)
    h: dict = {}
    used = [set() for _ in range(n)]
    count = [0]

    def ok(i, a, v) -> bool:
        for (j, b), w in h.items():
            if j == i:
                d0, d1 = cos[i].d(a, b), cos[i].d(v, w)
                if (d1 != d0) if iso else (d1 > d0 + slack):
                    return False
            for (p, q, s, t, s2, t2) in ((i, j, a, b, v, w), (j, i, b, a, w, v)):
                for table in rels_by_pair.get((p, q), ()):
                    r0, r1 = table[(s, t)], table[(s2, t2)]
                    if (r1 != r0) if iso else (r1 > r0 + slack):
                        return False
        # relations of a sort with itself at the same point
        for table in rels_by_pair.get((i, i), ()):
            r0, r1 = table[(a, a)], table[(v, v)]
            if (r1 != r0) if iso else (r1 > r0 + slack):
                return False
        return True

    def rec(pos: int):
        if pos == len(slots):
            count[0] += 1
            if budget is not None and count[0] > budget:
                raise BudgetExhausted("too many homomorphisms", budget)
            yield {i: {a: h[(i, a)] for a in fx[i]} for i in range(n)}
            return
        i, a = slots[pos]
        for v in fy[i]:
            if iso and v in used[i]:
                continue
            if ok(i, a, v):
                h[(i, a)] = v
                used[i].add(v)
                yield from rec(pos + 1)
                del h[(i, a)]
                used[i].discard(v)

    yield from rec(0)


def enumerate_metric_homs(MF, x, y, budget=None) -> list[dict]:
    return list(_iter_metric_homs(MF, x, y, iso=False, budget=budget))


def enumerate_metric_isos(MF, x, y, budget=None) -> list[dict]:
    return list(_iter_metric_homs(MF, x, y, iso=True, budget=budget))


def count_eps_homs(MF, x, y, eps, budget=None) -> int:
    """Experimental: maps that are homomorphisms up to additive slack ``eps``."""
    return sum(1 for _ in _iter_metric_homs(MF, x, y, iso=False, slack=Fraction(eps), budget=budget))


def metric_eta(MF: MetricStructureFamily, g: int) -> dict:
    x = MF.G.src[g]
    return {i: {a: C.act(g, a) for a in C.fiber(x)} for i, C in enumerate(MF.cosets)}


def metric_phi(MF: MetricStructureFamily, x: int, h: Mapping) -> dict:
    return {i: h[i][MF.cosets[i].unit_section[x]] for i in MF.containing(x)}


def metric_coherent_families(MF: MetricStructureFamily, x: int, y: int) -> list[dict]:
    """``lim (Ĝ/U)_y`` over norms ``U`` with ``x ∈ U_{=0}``, under ``π_{U,V}`` for ``U ⊑ V``."""
    idx = MF.containing(x)
    cos = MF.cosets

    def proj(i, j, a):
        return cos[j].class_of[min(cos[i].classes[a])]

    def below(i, j):
        return all(MF.norms[i](g) >= MF.norms[j](g) for g in MF.G.morphisms)

    out, choice = [], {}

    def rec(n):
        if n == len(idx):
            out.append(dict(choice))
            return
        i = idx[n]
        for a in cos[i].fiber(y):
            good = True
            for j in idx[:n]:
                if below(i, j) and proj(i, j, a) != choice[j]:
                    good = False
                if below(j, i) and proj(j, i, choice[j]) != a:
                    good = False
            if good:
                choice[i] = a
                rec(n + 1)
                del choice[i]

    rec(0)
    return out


@dataclass
class MetricYonedaReport:
    ok: bool = True
    failures: list = field(default_factory=list)
    separation_failures: list = field(default_factory=list)
    counts: dict = field(default_factory=dict)

    def fail(self, reason, witness):
        self.ok = False
        self.failures.append({"reason": reason, "witness": witness})

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "failures": self.failures,
            "separation_failures": self.separation_failures,
            "counts": [[x, y, c] for (x, y), c in sorted(self.counts.items())],
            "completion": "finite quotient, no points added",
        }


def metric_yoneda_check(
    G: FinGroupoid,
    norms: Sequence[GreySet],
    sections: Sequence[Iterable[int]] | None = None,
    budget: int | None = 20000,
) -> MetricYonedaReport:
    """Verify Φ injective, ``G(x, y) -> lim`` bijective, and ``η : G ≅ Iso(M)``.

    Pairs of objects whose hom-set is not separated by the norms are listed
    and skipped.
    """
    MF = metric_canonical_structure(G, norms, sections)
    rep = MetricYonedaReport()
    bad = separation_failures(G, MF.norms)
    rep.separation_failures = [(G.names[g], G.names[h]) for g, h in bad]
    skipped = {(G.src[g], G.tgt[g]) for g, _ in bad}

    def key(h):
        return tuple(tuple(sorted(h[i].items())) for i in sorted(h))

    for x, y in itertools.product(G.objects, repeat=2):
        name = (G.names[x], G.names[y])
        if (x, y) in skipped:
            continue
        homs = enumerate_metric_homs(MF, x, y, budget)
        isos = {key(h) for h in enumerate_metric_isos(MF, x, y, budget)}
        images = [key(metric_eta(MF, g)) for g in G.hom(x, y)]
        fams = metric_coherent_families(MF, x, y)
        rep.counts[name] = {
            "groupoid": len(G.hom(x, y)),
            "isos": len(isos),
            "homs": len(homs),
            "limit": len(fams),
        }
        if len(set(images)) != len(images):
            rep.fail("η is not injective", name)
        if set(images) != isos:
            rep.fail("η is not onto the isometric isomorphisms", name)
        phis = [tuple(sorted(metric_phi(MF, x, h).items())) for h in homs]
        if len(set(phis)) != len(phis):
            rep.fail("Φ is not injective", name)
        fam_keys = {tuple(sorted(a.items())) for a in fams}
        if not set(phis) <= fam_keys:
            rep.fail("Φ lands outside the coherent families", name)
        eta_fams = [tuple(sorted({i: MF.cosets[i].class_of[g] for i in MF.containing(x)}.items())) for g in G.hom(x, y)]
        if len(set(eta_fams)) != len(eta_fams) or set(eta_fams) != fam_keys:
            rep.fail("G(x, y) -> lim is not bijective", name)
    return rep
