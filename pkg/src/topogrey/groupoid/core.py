"""Finite groupoids as explicit tables.

Morphisms are the integers ``0..m-1`` (with display names).  Objects are
identified with their unit morphisms, so ``src[g]`` and ``tgt[g]`` are unit
morphism indices.  ``g·h`` means "first h, then g" and is defined exactly
when ``src[g] == tgt[h]``.
"""

from __future__ import annotations

import itertools
from typing import Hashable, Iterable, Mapping, Sequence

from ..errors import PreconditionError, Verdict


class FinGroupoid:
    __slots__ = ("names", "src", "tgt", "table", "inv", "objects", "_by_name", "_homs")

    def __init__(
        self,
        names: Sequence[Hashable],
        src: Sequence[int],
        tgt: Sequence[int],
        table: Sequence[Sequence[int | None]],
        inv: Sequence[int],
        validate: bool = True,
    ):
        self.names = tuple(names)
        self.src = tuple(src)
        self.tgt = tuple(tgt)
        self.table = tuple(tuple(row) for row in table)
        self.inv = tuple(inv)
        self.objects = tuple(sorted(set(self.src) | set(self.tgt)))
        self._by_name = {n: i for i, n in enumerate(self.names)}
        self._homs = None
        if validate:
            validate_groupoid(self).raise_if_failed()

    # -- basic access ------------------------------------------------------------
    def __len__(self) -> int:
        return len(self.names)

    def __repr__(self) -> str:
        return f"FinGroupoid({len(self.objects)} objects, {len(self)} morphisms)"

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinGroupoid):
            return NotImplemented
        return (self.names, self.src, self.tgt, self.table, self.inv) == (
            other.names, other.src, other.tgt, other.table, other.inv,
        )

    def __hash__(self):
        return hash((self.names, self.table))

    @property
    def morphisms(self) -> range:
        return range(len(self.names))

    def id_of(self, name: Hashable) -> int:
        return self._by_name[name]

    def mul(self, g: int, h: int) -> int:
        r = self.table[g][h]
        if r is None:
            raise PreconditionError("morphisms are not composable", (self.names[g], self.names[h]))
        return r

    def composable(self, g: int, h: int) -> bool:
        return self.src[g] == self.tgt[h]

    def is_unit(self, g: int) -> bool:
        return self.src[g] == g and self.tgt[g] == g

    def hom(self, x: int, y: int) -> tuple:
        """Morphisms ``x -> y`` in index order."""
        if self._homs is None:
            homs: dict = {}
            for g in self.morphisms:
                homs.setdefault((self.src[g], self.tgt[g]), []).append(g)
            self._homs = {k: tuple(v) for k, v in homs.items()}
        return self._homs.get((x, y), ())

    def with_source(self, xs: Iterable[int]) -> tuple:
        xs = set(xs)
        return tuple(g for g in self.morphisms if self.src[g] in xs)

    # -- subsets ------------------------------------------------------------------
    def product(self, A: Iterable[int], B: Iterable[int]) -> frozenset:
        """``A·B`` over all composable pairs."""
        B = tuple(B)
        return frozenset(self.table[a][b] for a in A for b in B if self.table[a][b] is not None)

    def inverse_set(self, A: Iterable[int]) -> frozenset:
        return frozenset(self.inv[a] for a in A)

    def units_of(self, A: Iterable[int]) -> frozenset:
        return frozenset(a for a in A if self.is_unit(a))

    # -- serialization --------------------------------------------------------------
    def to_json(self) -> dict:
        n = self.names
        return {
            "objects": [str(n[x]) for x in self.objects],
            "morphisms": [
                {"id": str(n[g]), "src": str(n[self.src[g]]), "tgt": str(n[self.tgt[g]])}
                for g in self.morphisms
            ],
            "compose": [[None if c is None else str(n[c]) for c in row] for row in self.table],
            "inverse": [str(n[i]) for i in self.inv],
        }

    @classmethod
    def from_json(cls, data: Mapping, validate: bool = True) -> "FinGroupoid":
        try:
            names = [m["id"] for m in data["morphisms"]]
            idx = {name: i for i, name in enumerate(names)}
            if len(idx) != len(names):
                raise PreconditionError("duplicate morphism id", names)
            src = [idx[m["src"]] for m in data["morphisms"]]
            tgt = [idx[m["tgt"]] for m in data["morphisms"]]
            table = [[None if c is None else idx[c] for c in row] for row in data["compose"]]
            inv = [idx[i] for i in data["inverse"]]
            declared = sorted(idx[o] for o in data.get("objects", []))
        except KeyError as exc:
            raise PreconditionError("unknown morphism id or missing field", str(exc)) from None
        G = cls(names, src, tgt, table, inv, validate=validate)
        if "objects" in data and tuple(declared) != G.objects:
            raise PreconditionError("declared objects differ from units", declared)
        return G


def validate_groupoid(G: FinGroupoid) -> Verdict:
    """Scan every axiom; the first failure is reported with the morphisms involved."""
    m = len(G.names)
    n = G.names
    if len(G.src) != m or len(G.tgt) != m or len(G.inv) != m or len(G.table) != m:
        return Verdict.reject("table sizes differ", (m,))
    if any(len(row) != m for row in G.table):
        return Verdict.reject("composition table is not square", (m,))
    for g in range(m):
        for ref in (G.src[g], G.tgt[g], G.inv[g]):
            if not 0 <= ref < m:
                return Verdict.reject("reference out of range", (n[g],))
    for x in G.objects:
        if G.src[x] != x or G.tgt[x] != x:
            return Verdict.reject("object is not a unit", (n[x],))
    T = G.table
    for g in range(m):
        for h in range(m):
            c = T[g][h]
            if (c is None) != (G.src[g] != G.tgt[h]):
                return Verdict.reject("composition defined on the wrong pairs", (n[g], n[h]))
            if c is not None:
                if not 0 <= c < m:
                    return Verdict.reject("reference out of range", (n[g], n[h]))
                if G.src[c] != G.src[h] or G.tgt[c] != G.tgt[g]:
                    return Verdict.reject("source/target of a product", (n[g], n[h]))
    for g in range(m):
        if T[g][G.src[g]] != g or T[G.tgt[g]][g] != g:
            return Verdict.reject("unit law", (n[g],))
        i = G.inv[g]
        if G.src[i] != G.tgt[g] or G.tgt[i] != G.src[g]:
            return Verdict.reject("inverse has wrong endpoints", (n[g],))
        if T[g][i] != G.tgt[g] or T[i][g] != G.src[g]:
            return Verdict.reject("inverse law", (n[g],))
    for g in range(m):
        for h in range(m):
            gh = T[g][h]
            if gh is None:
                continue
            for k in range(m):
                hk = T[h][k]
                if hk is None:
                    continue
                if T[gh][k] != T[g][hk]:
                    return Verdict.reject("associativity", (n[g], n[h], n[k]))
    return Verdict.accept()


def orbits(G: FinGroupoid) -> list[frozenset]:
    """Connected components of the objects, each listed once, by least member."""
    parent = {x: x for x in G.objects}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in G.morphisms:
        a, b = find(G.src[g]), find(G.tgt[g])
        if a != b:
            parent[max(a, b)] = min(a, b)
    classes: dict = {}
    for x in G.objects:
        classes.setdefault(find(x), set()).add(x)
    return [frozenset(c) for _, c in sorted(classes.items())]


# -- subgroupoids ------------------------------------------------------------------


def is_subgroupoid(G: FinGroupoid, U: Iterable[int]) -> Verdict:
    U = frozenset(U)
    for g in sorted(U):
        if G.inv[g] not in U:
            return Verdict.reject("not symmetric", (G.names[g],))
    for g in sorted(U):
        for h in sorted(U):
            c = G.table[g][h]
            if c is not None and c not in U:
                return Verdict.reject("not closed under composition", (G.names[g], G.names[h]))
    return Verdict.accept()


def generated_subgroupoid(G: FinGroupoid, A: Iterable[int]) -> frozenset:
    """Least subgroupoid containing ``A``: close ``A ∪ A⁻¹`` under products."""
    A = frozenset(A)
    if any(not 0 <= a < len(G) for a in A):
        raise PreconditionError("generator outside the groupoid", sorted(A))
    gens = A | G.inverse_set(A)
    closure = set(gens)
    frontier = set(gens)
    while frontier:
        new = set()
        for g in frontier:
            for h in gens:
                for c in (G.table[g][h], G.table[h][g]):
                    if c is not None and c not in closure:
                        new.add(c)
        closure |= new
        frontier = new
    return frozenset(closure)


def unit_subgroupoid(G: FinGroupoid, xs: Iterable[int] | None = None) -> frozenset:
    return frozenset(G.objects if xs is None else xs)


# -- constructions --------------------------------------------------------------------


def from_composition(
    names: Sequence[Hashable],
    src: Sequence[int],
    tgt: Sequence[int],
    compose,
) -> FinGroupoid:
    """Build tables from a composition callback ``compose(g, h) -> index``."""
    m = len(names)
    table = [[compose(g, h) if src[g] == tgt[h] else None for h in range(m)] for g in range(m)]
    inv = []
    for g in range(m):
        found = [h for h in range(m) if table[g][h] is not None and table[g][h] == tgt[g]
                 and src[h] == tgt[g] and tgt[h] == src[g]]
        if not found:
            raise PreconditionError("morphism has no inverse", names[g])
        inv.append(found[0])
    return FinGroupoid(names, src, tgt, table, inv)


def group_groupoid(mult: Sequence[Sequence[int]], names: Sequence[Hashable] | None = None) -> FinGroupoid:
    """One-object groupoid from a group table with identity 0."""
    k = len(mult)
    names = names or [str(i) for i in range(k)]
    return from_composition(names, [0] * k, [0] * k, lambda g, h: mult[g][h])


def cyclic_group(k: int) -> FinGroupoid:
    return group_groupoid([[(a + b) % k for b in range(k)] for a in range(k)])


def pair_groupoid(n: int, group: Sequence[Sequence[int]] | None = None) -> FinGroupoid:
    """``pair(n) × H``: morphisms ``(j, i, h)`` from object i to object j.

    Morphisms are ordered so the units ``(i, i, 0)`` come first.
    """
    group = group or [[0]]
    k = len(group)
    triples = [(i, i, 0) for i in range(n)]
    triples += [(j, i, h) for j in range(n) for i in range(n) for h in range(k) if (j, i, h) not in triples]
    index = {t: a for a, t in enumerate(triples)}
    names = [f"{j}<{i}" if k == 1 else f"{j}<{i}:{h}" for j, i, h in triples]
    src = [index[(i, i, 0)] for j, i, h in triples]
    tgt = [index[(j, j, 0)] for j, i, h in triples]

    def compose(a, b):
        j, i, h = triples[a]
        i2, l, h2 = triples[b]
        return index[(j, l, group[h][h2])]

    return from_composition(names, src, tgt, compose)


def disjoint_union(*parts: FinGroupoid) -> FinGroupoid:
    names, src, tgt, offs = [], [], [], []
    off = 0
    for p, G in enumerate(parts):
        offs.append(off)
        names += [f"{p}.{n}" for n in G.names]
        src += [s + off for s in G.src]
        tgt += [t + off for t in G.tgt]
        off += len(G)
    m = off
    table = [[None] * m for _ in range(m)]
    inv = [0] * m
    for G, o in zip(parts, offs):
        for g in G.morphisms:
            inv[g + o] = G.inv[g] + o
            for h in G.morphisms:
                c = G.table[g][h]
                if c is not None:
                    table[g + o][h + o] = c + o
    return FinGroupoid(names, src, tgt, table, inv)


def relabel(G: FinGroupoid, perm: Sequence[int]) -> FinGroupoid:
    """Renumber morphisms: old index ``g`` becomes ``perm[g]`` (names travel along)."""
    m = len(G)
    back = [0] * m
    for old, new in enumerate(perm):
        back[new] = old
    names = [G.names[back[a]] for a in range(m)]
    src = [perm[G.src[back[a]]] for a in range(m)]
    tgt = [perm[G.tgt[back[a]]] for a in range(m)]
    table = [
        [None if (c := G.table[back[a]][back[b]]) is None else perm[c] for b in range(m)]
        for a in range(m)
    ]
    inv = [perm[G.inv[back[a]]] for a in range(m)]
    return FinGroupoid(names, src, tgt, table, inv)


def action_groupoid(
    G: FinGroupoid,
    points: Sequence[Hashable],
    anchor: Mapping,
    act: Mapping,
) -> FinGroupoid:
    """Category of elements of an action ``G ↷ points`` over ``anchor: points -> G⁰``.

    ``act[(g, a)]`` is defined for ``src[g] == anchor[a]``.  Morphisms are the
    pairs ``(g, a)``: ``a -> g·a``.  Action axioms are checked first.
    """
    points = tuple(points)
    pairs = [(g, a) for a in points for g in G.morphisms if G.src[g] == anchor[a]]
    for g, a in pairs:
        if (g, a) not in act:
            raise PreconditionError("action undefined", (G.names[g], a))
        b = act[(g, a)]
        if b not in anchor or anchor[b] != G.tgt[g]:
            raise PreconditionError("action does not respect the anchor", (G.names[g], a))
    for a in points:
        if act[(anchor[a], a)] != a:
            raise PreconditionError("unit does not act trivially", (a,))
    for g, a in pairs:
        b = act[(g, a)]
        for h in G.morphisms:
            if G.src[h] == G.tgt[g] and act[(h, b)] != act[(G.mul(h, g), a)]:
                raise PreconditionError("action is not associative", (G.names[h], G.names[g], a))
    # units first so that objects are the points in their given order
    units = [(anchor[a], a) for a in points]
    unit_set = set(units)
    pairs = units + [p for p in pairs if p not in unit_set]
    index = {p: i for i, p in enumerate(pairs)}
    names = [f"{G.names[g]}@{a}" for g, a in pairs]
    src = [index[(anchor[a], a)] for g, a in pairs]
    tgt = [index[(anchor[act[(g, a)]], act[(g, a)])] for g, a in pairs]

    def compose(i, j):
        g, b = pairs[i]
        h, a = pairs[j]
        return index[(G.mul(g, h), a)]

    return from_composition(names, src, tgt, compose)


def induced_subgroupoid(G: FinGroupoid, objects: Iterable[int]) -> tuple[FinGroupoid, list[int]]:
    """Full subgroupoid on some objects, renumbered; returns it with the index list."""
    objs = set(objects)
    return restrict(G, [g for g in G.morphisms if G.src[g] in objs and G.tgt[g] in objs])


def restrict(G: FinGroupoid, members: Iterable[int]) -> tuple[FinGroupoid, list[int]]:
    """A subgroupoid as a groupoid in its own right, renumbered in index order."""
    keep = sorted(set(members))
    is_subgroupoid(G, keep).raise_if_failed()
    pos = {g: i for i, g in enumerate(keep)}
    H = FinGroupoid(
        [G.names[g] for g in keep],
        [pos[G.src[g]] for g in keep],
        [pos[G.tgt[g]] for g in keep],
        [[None if (c := G.table[g][h]) is None else pos[c] for h in keep] for g in keep],
        [pos[G.inv[g]] for g in keep],
    )
    return H, keep


def all_composable_triples(G: FinGroupoid):
    for g, h, k in itertools.product(G.morphisms, repeat=3):
        if G.composable(g, h) and G.composable(h, k):
            yield g, h, k
