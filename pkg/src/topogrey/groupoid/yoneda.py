"""The canonical structure of a finite groupoid and its Yoneda representation.

Sorts are coset spaces ``G/U`` for ``U`` in a chosen family of subgroupoids;
function symbols are the right multiplications ``f_{U,V,S}``.  The group(oid)
is recovered as the isomorphism groupoid of this structure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..errors import InsufficientBasis, PreconditionError, Verdict
from .core import FinGroupoid, is_subgroupoid
from .cosets import check_section, coset_space, right_mult_map
from .structures import DiscreteStructureFamily, enumerate_homs, enumerate_isos, hom_key, compose_homs, is_hom


def sort_name(i: int) -> str:
    return f"U{i}"


def function_name(i: int, j: int, k: int) -> str:
    return f"f[U{i},U{j},S{k}]"


@dataclass(frozen=True)
class CanonicalStructure:
    G: FinGroupoid
    subgroupoids: tuple
    sections: tuple
    cosets: tuple
    family: DiscreteStructureFamily
    maps: Mapping          # (i, j, k) -> {class of G/U_i: class of G/U_j}

    def containing(self, x: int) -> list[int]:
        """Indices ``i`` with ``x ∈ U_i``."""
        return [i for i, U in enumerate(self.subgroupoids) if x in U]

    def projection(self, i: int, j: int) -> Mapping:
        k = self.sections[j].index(self.subgroupoids[j])
        return self.maps[(i, j, k)]


def canonical_structure(
    G: FinGroupoid,
    subgroupoids: Sequence,
    sections: Sequence[Sequence],
) -> CanonicalStructure:
    Us = tuple(frozenset(U) for U in subgroupoids)
    Ss = tuple(tuple(frozenset(S) for S in fam) for fam in sections)
    if len(Ss) != len(Us):
        raise PreconditionError("one section family per subgroupoid is required", (len(Us), len(Ss)))
    for i, U in enumerate(Us):
        v = is_subgroupoid(G, U)
        if not v:
            raise PreconditionError(f"U{i}: {v.reason}", v.witness)
        if U not in Ss[i]:
            raise PreconditionError("section family must contain U itself", sort_name(i))
        for k, S in enumerate(Ss[i]):
            v = check_section(G, U, S)
            if not v:
                raise PreconditionError(f"S{k} of U{i}: {v.reason}", v.witness)
    uncovered = [x for x in G.objects if not any(x in U for U in Us)]
    if uncovered:
        raise PreconditionError("object lies in no chosen subgroupoid", G.names[uncovered[0]])
    covered = frozenset().union(*(S for fam in Ss for S in fam)) if Ss else frozenset()
    missing = [g for g in G.morphisms if g not in covered]
    if missing:
        raise PreconditionError("sections do not cover every morphism", G.names[missing[0]])

    cosets = tuple(coset_space(G, U) for U in Us)
    maps = {}
    for i, CU in enumerate(cosets):
        for j, CV in enumerate(cosets):
            for k, S in enumerate(Ss[j]):
                SS = G.product(S, G.inverse_set(S))
                if Us[i] <= SS:
                    maps[(i, j, k)] = right_mult_map(G, CU, CV, S)
    sorts = tuple(sort_name(i) for i in range(len(Us)))
    fibers = {x: {sort_name(i): C.fiber(x) for i, C in enumerate(cosets)} for x in G.objects}
    fn_sorts = {function_name(i, j, k): ((sort_name(i),), sort_name(j)) for (i, j, k) in maps}
    fns = {
        function_name(i, j, k): {
            x: {(c,): table[c] for c in cosets[i].fiber(x)} for x in G.objects
        }
        for (i, j, k), table in maps.items()
    }
    family = DiscreteStructureFamily(tuple(G.objects), sorts, fibers, {}, {}, fn_sorts, fns)
    return CanonicalStructure(G, Us, Ss, cosets, family, maps)


def eta(CS: CanonicalStructure, g: int) -> dict:
    """Left multiplication by ``g : x -> y`` as a map ``M_x -> M_y``."""
    x = CS.G.src[g]
    return {
        sort_name(i): {c: C.act(g, c) for c in C.fiber(x)} for i, C in enumerate(CS.cosets)
    }


def yoneda_phi(CS: CanonicalStructure, x: int, h: Mapping) -> dict:
    """``Φ(h) = (h_U(U_x))_U`` over the ``U`` containing ``x``."""
    return {i: h[sort_name(i)][CS.cosets[i].unit_section[x]] for i in CS.containing(x)}


def check_coherent(CS: CanonicalStructure, x: int, y: int, a: Mapping) -> Verdict:
    idx = CS.containing(x)
    if sorted(a) != idx:
        return Verdict.reject("family indexed by the wrong subgroupoids", tuple(sorted(a)))
    for i in idx:
        if CS.cosets[i].tau[a[i]] != y:
            return Verdict.reject("entry lies over the wrong object", (sort_name(i),))
    for i, j in itertools.permutations(idx, 2):
        if CS.subgroupoids[i] <= CS.subgroupoids[j] and CS.projection(i, j)[a[i]] != a[j]:
            return Verdict.reject("not coherent under projection", (sort_name(i), sort_name(j)))
    return Verdict.accept()


def coherent_families(CS: CanonicalStructure, x: int, y: int) -> list[dict]:
    """The inverse limit ``lim_{x ∈ U} (G/U)_y``, enumerated independently of homs."""
    idx = CS.containing(x)
    out = []
    choice: dict = {}

    def rec(n: int):
        if n == len(idx):
            out.append(dict(choice))
            return
        i = idx[n]
        for c in CS.cosets[i].fiber(y):
            ok = True
            for j in idx[:n]:
                Ui, Uj = CS.subgroupoids[i], CS.subgroupoids[j]
                if Ui <= Uj and CS.projection(i, j)[c] != choice[j]:
                    ok = False
                    break
                if Uj <= Ui and CS.projection(j, i)[choice[j]] != c:
                    ok = False
                    break
            if ok:
                choice[i] = c
                rec(n + 1)
                del choice[i]

    rec(0)
    return out


def yoneda_psi(CS: CanonicalStructure, x: int, y: int, a: Mapping) -> dict:
    """``Ψ(a)_U(b) = a_V · S`` for any ``b ⊆ S ∈ 𝒮_U`` and ``x ∈ V ⊆ S·S⁻¹``.

    Every admissible ``(V, S)`` is tried and the answers must agree.
    """
    check_coherent(CS, x, y, a).raise_if_failed()
    Vs = CS.containing(x)
    h: dict = {}
    for i, C in enumerate(CS.cosets):
        part = {}
        for b in C.fiber(x):
            members = C.classes[b]
            values = set()
            for k, S in enumerate(CS.sections[i]):
                if not members <= S:
                    continue
                for j in Vs:
                    if (j, i, k) in CS.maps:
                        values.add(CS.maps[(j, i, k)][a[j]])
            if not values:
                raise InsufficientBasis("no admissible (V, S) for a coset", (sort_name(i), b))
            if len(values) != 1:
                raise AssertionError(f"Ψ depends on the choice of (V, S) at {sort_name(i)}:{b}")
            part[b] = values.pop()
        h[sort_name(i)] = part
    return h


@dataclass
class EtaReport:
    ok: bool = True
    failures: list = field(default_factory=list)
    groupoid_counts: dict = field(default_factory=dict)
    iso_counts: dict = field(default_factory=dict)
    hom_counts: dict = field(default_factory=dict)
    limit_counts: dict = field(default_factory=dict)

    def fail(self, reason: str, witness) -> None:
        self.ok = False
        self.failures.append({"reason": reason, "witness": witness})

    def to_json(self) -> dict:
        def table(d):
            return [[str(x), str(y), n] for (x, y), n in sorted(d.items())]

        return {
            "ok": self.ok,
            "failures": self.failures,
            "groupoid_counts": table(self.groupoid_counts),
            "iso_counts": table(self.iso_counts),
            "hom_counts": table(self.hom_counts),
            "limit_counts": table(self.limit_counts),
        }


def verify_eta_iso(
    G: FinGroupoid,
    subgroupoids: Sequence,
    sections: Sequence[Sequence],
    CS: CanonicalStructure | None = None,
) -> EtaReport:
    """Check that ``η : G -> Iso(M)`` is an isomorphism and that Φ, Ψ are inverse."""
    CS = CS or canonical_structure(G, subgroupoids, sections)
    M = CS.family
    rep = EtaReport()
    for x in G.objects:
        ident = {s: {e: e for e in M.fibers[x][s]} for s in M.sorts}
        if hom_key(M, x, eta(CS, x)) != hom_key(M, x, ident):
            rep.fail("η of a unit is not the identity", G.names[x])
    for g in G.morphisms:
        for h in G.morphisms:
            c = G.table[g][h]
            if c is None:
                continue
            lhs = hom_key(M, G.src[h], eta(CS, c))
            rhs = hom_key(M, G.src[h], compose_homs(M, eta(CS, g), eta(CS, h)))
            if lhs != rhs:
                rep.fail("η is not functorial", (G.names[g], G.names[h]))
    for x, y in itertools.product(G.objects, repeat=2):
        name = (G.names[x], G.names[y])
        homs = enumerate_homs(M, x, y)
        isos = {hom_key(M, x, h) for h in enumerate_isos(M, x, y)}
        images = [hom_key(M, x, eta(CS, g)) for g in G.hom(x, y)]
        rep.groupoid_counts[name] = len(G.hom(x, y))
        rep.iso_counts[name] = len(isos)
        rep.hom_counts[name] = len(homs)
        if len(set(images)) != len(images):
            rep.fail("η is not injective", name)
        if set(images) != isos:
            rep.fail("η is not onto the isomorphisms", name)
        for g in G.hom(x, y):
            if yoneda_phi(CS, x, eta(CS, g)) != {i: CS.cosets[i].class_of[g] for i in CS.containing(x)}:
                rep.fail("Φ(η(g)) differs from the cosets of g", G.names[g])
        fams = coherent_families(CS, x, y)
        rep.limit_counts[name] = len(fams)
        if len(fams) != len(homs):
            rep.fail("hom count differs from the inverse-limit count", name)
        for h in homs:
            a = yoneda_phi(CS, x, h)
            if not check_coherent(CS, x, y, a):
                rep.fail("Φ(h) is not coherent", name)
                continue
            try:
                back = yoneda_psi(CS, x, y, a)
            except InsufficientBasis as exc:
                rep.fail("insufficient basis", exc.witness)
                continue
            if hom_key(M, x, back) != hom_key(M, x, h):
                rep.fail("Ψ∘Φ is not the identity", name)
        for a in fams:
            try:
                h = yoneda_psi(CS, x, y, a)
            except InsufficientBasis as exc:
                rep.fail("insufficient basis", exc.witness)
                continue
            if not is_hom(M, x, y, h):
                rep.fail("Ψ(a) is not a homomorphism", name)
            if yoneda_phi(CS, x, h) != a:
                rep.fail("Φ∘Ψ is not the identity", name)
    return rep
