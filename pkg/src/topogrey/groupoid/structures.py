"""Fiberwise finite structures, their homomorphisms, and uniformization.

A family assigns to each base point ``x`` a finite many-sorted structure
``M_x``.  Homomorphisms ``M_x -> M_y`` are sort-wise maps preserving every
relation and commuting with every function.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from ..errors import PreconditionError
from .core import FinGroupoid, orbits

CONST_TAG = "#const"
SINGLE_SORT = "*"


@dataclass(frozen=True)
class DiscreteStructureFamily:
    """``fibers[x][sort]`` is a tuple of elements in canonical order.

    ``relation_sorts[R]`` is the sort tuple of ``R``; ``relations[R][x]`` a
    frozenset of tuples.  ``function_sorts[f] = (domain sorts, codomain sort)``;
    ``functions[f][x]`` maps argument tuples to values.
    """

    base: tuple
    sorts: tuple
    fibers: Mapping
    relation_sorts: Mapping = field(default_factory=dict)
    relations: Mapping = field(default_factory=dict)
    function_sorts: Mapping = field(default_factory=dict)
    functions: Mapping = field(default_factory=dict)

    def __post_init__(self):
        for x in self.base:
            fib = self.fibers[x]
            for s in self.sorts:
                if len(set(fib[s])) != len(fib[s]):
                    raise PreconditionError("repeated element in a fiber", (x, s))
            members = {s: set(fib[s]) for s in self.sorts}
            for R, sorts in self.relation_sorts.items():
                for t in self.relations[R][x]:
                    if len(t) != len(sorts) or any(a not in members[s] for a, s in zip(t, sorts)):
                        raise PreconditionError("relation tuple breaks its arity", (R, x, t))
            for f, (dom, cod) in self.function_sorts.items():
                table = self.functions[f][x]
                for args in itertools.product(*(fib[s] for s in dom)):
                    if args not in table:
                        raise PreconditionError("function is not total", (f, x, args))
                    if table[args] not in members[cod]:
                        raise PreconditionError("function value in the wrong sort", (f, x, args))

    def size(self, x) -> int:
        return sum(len(self.fibers[x][s]) for s in self.sorts)

    def to_json(self) -> dict:
        return {
            "base": [str(x) for x in self.base],
            "sorts": list(self.sorts),
            "fibers": {str(x): {s: [str(e) for e in self.fibers[x][s]] for s in self.sorts} for x in self.base},
            "relations": {
                R: {"sorts": list(sorts), "tuples": {str(x): sorted([str(a) for a in t] for t in self.relations[R][x]) for x in self.base}}
                for R, sorts in self.relation_sorts.items()
            },
            "functions": {
                f: {
                    "domain": list(dom),
                    "codomain": cod,
                    "table": {
                        str(x): [[[str(a) for a in args], str(v)] for args, v in self.functions[f][x].items()]
                        for x in self.base
                    },
                }
                for f, (dom, cod) in self.function_sorts.items()
            },
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "DiscreteStructureFamily":
        base = tuple(data["base"])
        sorts = tuple(data["sorts"])
        fibers = {x: {s: tuple(data["fibers"][x][s]) for s in sorts} for x in base}
        rel_sorts, rels, fn_sorts, fns = {}, {}, {}, {}
        for R, spec in data.get("relations", {}).items():
            rel_sorts[R] = tuple(spec["sorts"])
            rels[R] = {x: frozenset(tuple(t) for t in spec["tuples"].get(x, [])) for x in base}
        for f, spec in data.get("functions", {}).items():
            fn_sorts[f] = (tuple(spec["domain"]), spec["codomain"])
            fns[f] = {x: {tuple(args): v for args, v in spec["table"].get(x, [])} for x in base}
        return cls(base, sorts, fibers, rel_sorts, rels, fn_sorts, fns)


Hom = Mapping  # sort -> {element: element}


def hom_key(M: DiscreteStructureFamily, x, h: Hom) -> tuple:
    """Hashable form of a homomorphism out of ``M_x``."""
    return tuple(tuple(h[s][e] for e in M.fibers[x][s]) for s in M.sorts)


def _constraints(M: DiscreteStructureFamily, x, y):
    """Constraints over slots ``(sort, element)``; each is (slots, check)."""
    fx = M.fibers[x]
    out = []
    for R, sorts in M.relation_sorts.items():
        target = M.relations[R][y]
        for t in M.relations[R][x]:
            slots = tuple(zip(sorts, t))
            out.append((slots, lambda h, slots=slots, target=target: tuple(h[s] for s in slots) in target))
    unary = {}
    for f, (dom, cod) in M.function_sorts.items():
        tx, ty = M.functions[f][x], M.functions[f][y]
        if len(dom) == 1:
            unary.setdefault(dom[0], []).append((cod, tx, ty))
            continue
        for args in itertools.product(*(fx[s] for s in dom)):
            slots = tuple(zip(dom, args)) + ((cod, tx[args]),)

            def check(h, slots=slots, ty=ty):
                *arg_slots, out_slot = slots
                return ty[tuple(h[s] for s in arg_slots)] == h[out_slot]

            out.append((slots, check))
    return out, unary


def _iter_homs(M: DiscreteStructureFamily, x, y, iso: bool) -> Iterator[dict]:
    fx, fy = M.fibers[x], M.fibers[y]
    if iso:
        if any(len(fx[s]) != len(fy[s]) for s in M.sorts):
            return
        if any(len(M.relations[R][x]) != len(M.relations[R][y]) for R in M.relation_sorts):
            return
    slots = [(s, e) for s in M.sorts for e in fx[s]]
    constraints, unary = _constraints(M, x, y)
    watch: dict = {}
    for cons in constraints:
        for slot in set(cons[0]):
            watch.setdefault(slot, []).append(cons)
    h: dict = {}
    used: dict = {s: set() for s in M.sorts}

    def assign(slot, value, trail) -> bool:
        """Assign and propagate unary functions; False on conflict."""
        stack = [(slot, value)]
        while stack:
            sl, v = stack.pop()
            if sl in h:
                if h[sl] != v:
                    return False
                continue
            if iso and v in used[sl[0]]:
                return False
            h[sl] = v
            used[sl[0]].add(v)
            trail.append(sl)
            for cons_slots, check in watch.get(sl, ()):
                if all(c in h for c in cons_slots) and not check(h):
                    return False
            for cod, tx, ty in unary.get(sl[0], ()):
                stack.append(((cod, tx[(sl[1],)]), ty[(v,)]))
        return True

    def undo(trail):
        for sl in reversed(trail):
            used[sl[0]].discard(h.pop(sl))

    def rec(i: int):
        while i < len(slots) and slots[i] in h:
            i += 1
        if i == len(slots):
            yield {s: {e: h[(s, e)] for e in fx[s]} for s in M.sorts}
            return
        slot = slots[i]
        for v in fy[slot[0]]:
            trail: list = []
            if assign(slot, v, trail):
                yield from rec(i + 1)
            undo(trail)

    yield from rec(0)


def enumerate_homs(M: DiscreteStructureFamily, x, y) -> list[dict]:
    return list(_iter_homs(M, x, y, iso=False))


def enumerate_isos(M: DiscreteStructureFamily, x, y) -> list[dict]:
    return list(_iter_homs(M, x, y, iso=True))


def is_hom(M: DiscreteStructureFamily, x, y, h: Hom) -> bool:
    fx, fy = M.fibers[x], M.fibers[y]
    for s in M.sorts:
        if set(h[s]) != set(fx[s]) or any(v not in fy[s] for v in h[s].values()):
            return False
    for R, sorts in M.relation_sorts.items():
        for t in M.relations[R][x]:
            if tuple(h[s][a] for s, a in zip(sorts, t)) not in M.relations[R][y]:
                return False
    for f, (dom, cod) in M.function_sorts.items():
        tx, ty = M.functions[f][x], M.functions[f][y]
        for args, v in tx.items():
            if ty[tuple(h[s][a] for s, a in zip(dom, args))] != h[cod][v]:
                return False
    return True


def brute_force_homs(M: DiscreteStructureFamily, x, y, iso: bool = False) -> list[dict]:
    """Oracle: filter all sort-wise maps."""
    fx, fy = M.fibers[x], M.fibers[y]
    per_sort = []
    for s in M.sorts:
        maps = itertools.product(fy[s], repeat=len(fx[s]))
        per_sort.append([dict(zip(fx[s], m)) for m in maps])
    out = []
    for combo in itertools.product(*per_sort):
        h = dict(zip(M.sorts, combo))
        if not is_hom(M, x, y, h):
            continue
        if iso and not all(
            len(set(h[s].values())) == len(fy[s]) == len(fx[s]) for s in M.sorts
        ):
            continue
        if iso and any(len(M.relations[R][x]) != len(M.relations[R][y]) for R in M.relation_sorts):
            continue
        out.append(h)
    return out


def compose_homs(M: DiscreteStructureFamily, g: Hom, h: Hom) -> dict:
    """``g ∘ h`` (first h)."""
    return {s: {e: g[s][v] for e, v in h[s].items()} for s in M.sorts}


def iso_groupoid(M: DiscreteStructureFamily) -> tuple[FinGroupoid, list, dict]:
    """``Iso(M)`` as explicit tables.

    Returns the groupoid, the list ``(x, y, h)`` per morphism, and the map from
    base points to object (unit morphism) indices.  Identity isos come first.
    """
    base = M.base
    entries = []
    keys = {}
    for x in base:
        ident = {s: {e: e for e in M.fibers[x][s]} for s in M.sorts}
        keys[(x, x, hom_key(M, x, ident))] = len(entries)
        entries.append((x, x, ident))
    for x, y in itertools.product(base, repeat=2):
        for h in enumerate_isos(M, x, y):
            k = (x, y, hom_key(M, x, h))
            if k not in keys:
                keys[k] = len(entries)
                entries.append((x, y, h))
    obj = {x: i for i, x in enumerate(base)}
    m = len(entries)
    names = [f"{x}>{y}#{i}" for i, (x, y, _) in enumerate(entries)]
    src = [obj[x] for x, _, _ in entries]
    tgt = [obj[y] for _, y, _ in entries]
    table = [[None] * m for _ in range(m)]
    inv = [0] * m
    for a, (x1, y1, g) in enumerate(entries):
        for b, (x0, y0, h) in enumerate(entries):
            if y0 == x1:
                table[a][b] = keys[(x0, y1, hom_key(M, x0, compose_homs(M, g, h)))]
        ginv = {s: {v: e for e, v in g[s].items()} for s in M.sorts}
        inv[a] = keys[(y1, x1, hom_key(M, y1, ginv))]
    return FinGroupoid(names, src, tgt, table, inv, validate=False), entries, obj


# -- adding constants ----------------------------------------------------------------------


def add_constants(M: DiscreteStructureFamily, k) -> DiscreteStructureFamily:
    """One-sorted relational family: all sorts tagged and merged, plus constants.

    ``k`` is a count (same for every fiber) or a mapping ``x -> count``.  Sorts
    become unary predicates ``sort:<s>``, functions become their graphs
    ``graph:<f>``, and the i-th constant is the unique member of ``C<i>``.
    """
    counts = {x: (k[x] if isinstance(k, Mapping) else k) for x in M.base}
    if any(c < 0 for c in counts.values()):
        raise PreconditionError("negative constant count", counts)
    top = max(counts.values(), default=0)
    fibers, rel_sorts, rels = {}, {}, {}
    for x in M.base:
        elems = [(s, e) for s in M.sorts for e in M.fibers[x][s]]
        elems += [(CONST_TAG, i) for i in range(counts[x])]
        fibers[x] = {SINGLE_SORT: tuple(elems)}
    for R, sorts in M.relation_sorts.items():
        rel_sorts[R] = (SINGLE_SORT,) * len(sorts)
        rels[R] = {x: frozenset(tuple(zip(sorts, t)) for t in M.relations[R][x]) for x in M.base}
    for s in M.sorts:
        name = f"sort:{s}"
        rel_sorts[name] = (SINGLE_SORT,)
        rels[name] = {x: frozenset(((s, e),) for e in M.fibers[x][s]) for x in M.base}
    for f, (dom, cod) in M.function_sorts.items():
        name = f"graph:{f}"
        rel_sorts[name] = (SINGLE_SORT,) * (len(dom) + 1)
        rels[name] = {
            x: frozenset(
                tuple(zip(dom, args)) + ((cod, v),) for args, v in M.functions[f][x].items()
            )
            for x in M.base
        }
    for i in range(top):
        name = f"C{i}"
        rel_sorts[name] = (SINGLE_SORT,)
        rels[name] = {
            x: frozenset([((CONST_TAG, i),)]) if i < counts[x] else frozenset() for x in M.base
        }
    return DiscreteStructureFamily(M.base, (SINGLE_SORT,), fibers, rel_sorts, rels)


def extend_with_constants(M: DiscreteStructureFamily, M2: DiscreteStructureFamily, x, h: Hom) -> dict:
    """The map on ``M2_x`` induced by ``h``: tagged elements move, constants stay."""
    out = {}
    for el in M2.fibers[x][SINGLE_SORT]:
        tag, e = el
        out[el] = el if tag == CONST_TAG else (tag, h[tag][e])
    return {SINGLE_SORT: out}


def check_constants_preserve_isos(M: DiscreteStructureFamily, M2: DiscreteStructureFamily) -> dict:
    """Verify ``h ↦ h⁺`` is a bijection ``Iso(M)(x,y) ≅ Iso(M2)(x,y)`` for all pairs."""
    counts = {}
    for x, y in itertools.product(M.base, repeat=2):
        old = enumerate_isos(M, x, y)
        new = {hom_key(M2, x, h) for h in enumerate_isos(M2, x, y)}
        images = {hom_key(M2, x, extend_with_constants(M, M2, x, h)) for h in old}
        if len(images) != len(old) or images != new:
            raise AssertionError(f"constants changed the isomorphisms {x}->{y}")
        counts[(x, y)] = len(old)
    return counts


# -- uniformization --------------------------------------------------------------------------


@dataclass(frozen=True)
class Uniformization:
    """Pushforward of a family onto the universe ``{0..N-1}``."""

    family: DiscreteStructureFamily
    padded: DiscreteStructureFamily
    mode: str
    N: int
    constant_counts: Mapping
    bijections: Mapping          # x -> {element of padded fiber: position}
    codes: Mapping               # x -> marker positions (io mode)
    images: tuple                # distinct pushed-forward structures
    image_family: DiscreteStructureFamily
    object_map: Mapping          # x -> index into images
    source: FinGroupoid
    source_entries: list
    target: FinGroupoid
    target_entries: list
    functor: "object"

    def decode(self, image_index: int):
        """Recover the base point from the marker positions of an image structure."""
        if self.mode != "injective_on_objects":
            raise PreconditionError("decoding needs injective_on_objects mode", self.mode)
        struct = self.image_family
        k = len(next(iter(self.codes.values())))
        pos = tuple(min(struct.relations[f"C{i}"][image_index])[0] for i in range(k))
        matches = [x for x, c in self.codes.items() if c == pos]
        if len(matches) != 1:
            raise AssertionError("marker positions do not decode")
        return matches[0]


def _pushforward_key(M2: DiscreteStructureFamily, x, f: Mapping) -> tuple:
    return tuple(
        (R, tuple(sorted(tuple(f[a] for a in t) for t in M2.relations[R][x])))
        for R in M2.relation_sorts
    )


def encoding_extra(M: DiscreteStructureFamily) -> int:
    """Least ``k`` such that ordered ``k``-tuples of ``{0..max+k-1}`` can name every base point."""
    top = max((M.size(x) for x in M.base), default=0)
    k = 1
    while math.perm(top + k, k) < len(M.base):
        k += 1
    return k


def uniformize(M: DiscreteStructureFamily, mode: str = "plain", k_extra: int | None = None):
    """Push every fiber onto ``{0..N-1}`` and return a :class:`Uniformization`.

    ``N`` is the largest fiber size plus ``k_extra``; each fiber is padded by
    constants to size ``N``.  In ``injective_on_objects`` mode the first
    ``k_extra`` constants of fiber ``x`` are placed at an ordered tuple of
    positions that identifies ``x``.  Left as None, ``k_extra`` is 1 in plain
    mode and the least workable value in ``injective_on_objects`` mode.
    """
    from .functors import FinFunctor

    if mode not in ("plain", "injective_on_objects"):
        raise PreconditionError("unknown mode", mode)
    if k_extra is None:
        k_extra = encoding_extra(M) if mode == "injective_on_objects" else 1
    if k_extra < 1:
        raise PreconditionError("k_extra must be at least 1", k_extra)
    if not M.base:
        raise PreconditionError("empty base", ())
    N = max(M.size(x) for x in M.base) + k_extra
    counts = {x: N - M.size(x) for x in M.base}
    M2 = add_constants(M, counts)
    codes: dict = {}
    if mode == "injective_on_objects":
        tuples = list(itertools.islice(itertools.permutations(range(N), k_extra), len(M.base)))
        if len(tuples) < len(M.base):
            raise PreconditionError("universe too small to encode the base", (N, k_extra, len(M.base)))
        codes = {x: tuples[i] for i, x in enumerate(M.base)}
    bijections = {}
    for x in M.base:
        elems = M2.fibers[x][SINGLE_SORT]
        f = {}
        if codes:
            for i, p in enumerate(codes[x]):
                f[(CONST_TAG, i)] = p
        free = (p for p in range(N) if p not in set(f.values()))
        for el in elems:
            if el not in f:
                f[el] = next(free)
        bijections[x] = f
    keys, object_map = [], {}
    for x in M.base:
        key = _pushforward_key(M2, x, bijections[x])
        if key not in keys:
            keys.append(key)
        object_map[x] = keys.index(key)
    universe = tuple(range(N))
    img_fibers = {i: {SINGLE_SORT: universe} for i in range(len(keys))}
    img_rels = {R: {i: frozenset(dict(key)[R]) for i, key in enumerate(keys)} for R in M2.relation_sorts}
    image_family = DiscreteStructureFamily(tuple(range(len(keys))), (SINGLE_SORT,), img_fibers, dict(M2.relation_sorts), img_rels)

    source, src_entries, src_obj = iso_groupoid(M)
    target, tgt_entries, tgt_obj = iso_groupoid(image_family)
    tgt_index = {(a, b, hom_key(image_family, a, h)): i for i, (a, b, h) in enumerate(tgt_entries)}
    mor = []
    for x, y, h in src_entries:
        h2 = extend_with_constants(M, M2, x, h)[SINGLE_SORT]
        fx, fy = bijections[x], bijections[y]
        inv_fx = {p: el for el, p in fx.items()}
        perm = {SINGLE_SORT: {p: fy[h2[inv_fx[p]]] for p in universe}}
        a, b = object_map[x], object_map[y]
        key = (a, b, hom_key(image_family, a, perm))
        if key not in tgt_index:
            raise AssertionError("pushed-forward isomorphism missing from the logic action")
        mor.append(tgt_index[key])
    functor = FinFunctor(source, target, tuple(mor))
    return Uniformization(
        M, M2, mode, N, counts, bijections, codes, tuple(keys), image_family, object_map,
        source, src_entries, target, tgt_entries, functor,
    )


@dataclass(frozen=True)
class UniformizationReport:
    full: bool
    faithful: bool
    injective_on_objects: bool
    orbit_reduction_injective: bool
    decode_round_trip: bool | None
    iso_counts: Mapping


def verify_uniformization(U: Uniformization) -> UniformizationReport:
    from .functors import check_functor, functor_analysis

    check_functor(U.functor).raise_if_failed(AssertionError)
    an = functor_analysis(U.functor, build_inverse=False)
    injective = len(set(U.object_map.values())) == len(U.family.base)
    # orbit classes: isomorphic fibers on the source side, isomorphic images on the target side
    src_orbits = orbits(U.source)
    tgt_orbits = orbits(U.target)
    tgt_class = {x: i for i, c in enumerate(tgt_orbits) for x in c}
    induced = {}
    ok_reduction = True
    for i, c in enumerate(src_orbits):
        imgs = {tgt_class[U.functor.obj[x]] for x in c}
        if len(imgs) != 1:
            ok_reduction = False
        induced[i] = min(imgs)
    if len(set(induced.values())) != len(induced):
        ok_reduction = False
    decode_ok = None
    if U.mode == "injective_on_objects":
        decode_ok = all(U.decode(U.object_map[x]) == x for x in U.family.base)
    pos = {x: i for i, x in enumerate(U.family.base)}
    counts = {
        (x, y): len(U.source.hom(pos[x], pos[y])) for x in U.family.base for y in U.family.base
    }
    return UniformizationReport(an.full, an.faithful, injective, ok_reduction, decode_ok, counts)
