"""Katětov functions over finite metric spaces and finite Urysohn towers.

A Katětov function ``u`` on a space ``F`` prescribes the distances from a
new point to the points of ``F``.  Over q-rational spaces the set of
q-rational Katětov functions is finite, so one round of "add a point for
every consistent description" is computable; iterating gives a tower of
finite spaces that approximates the Urysohn sphere from below.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterator, Mapping, Sequence

from .errors import PreconditionError, Verdict
from .finmetric import FinMetricSpace, check_partial_isometry, hausdorff_distance, iter_isometries
from .greycore import ONE, GreySet, fmt_rational, map_image, r01, saturate, trunc_add


@dataclass(frozen=True)
class KatetovFunction:
    base: FinMetricSpace
    values: tuple

    def __post_init__(self):
        vals = tuple(r01(v) for v in self.values)
        if len(vals) != len(self.base):
            raise ValueError("Katětov function must be total on its base")
        object.__setattr__(self, "values", vals)

    def __call__(self, p: Hashable) -> Fraction:
        return self.values[self.base.index[p]]

    def as_dict(self) -> dict:
        return dict(zip(self.base.points, self.values))

    def as_greyset(self) -> GreySet:
        return GreySet(self.base.points, self.as_dict())

    @classmethod
    def from_mapping(cls, base: FinMetricSpace, mapping: Mapping) -> "KatetovFunction":
        return cls(base, tuple(mapping[p] for p in base.points))

    def to_json(self) -> dict:
        return {
            "support": [str(p) for p in self.base.points],
            "values": [fmt_rational(v) for v in self.values],
        }


def is_katetov(u: KatetovFunction) -> Verdict:
    X, vals = u.base, u.values
    n = len(X)
    X, vals = u.base, u.values
    for i in range(n):
        for j in range(i + 1, n):
            d = X.dist[i][j]
            if abs(vals[i] - vals[j]) > d:
                return Verdict.reject("not 1-Lipschitz", (X.points[i], X.points[j]))
            if vals[i] + vals[j] < d:
                return Verdict.reject("sum below distance", (X.points[i], X.points[j]))
    return Verdict.accept()


def katetov_distance(u: KatetovFunction, v: KatetovFunction) -> Fraction:
    if u.base.points != v.base.points:
        raise PreconditionError("Katětov functions over different bases", (u.base.points, v.base.points))
    return max((abs(a - b) for a, b in zip(u.values, v.values)), default=Fraction(0))


def delta_embed(X: FinMetricSpace, x: Hashable) -> KatetovFunction:
    return KatetovFunction(X, X.row(x))


def extend_support(u: KatetovFunction, Z: FinMetricSpace) -> KatetovFunction:
    """``z ↦ min_x d(z, x) +̇ u(x)``: the extension along ``F ⊆ Z``."""
    F = u.base
    if not F.is_subspace_of(Z):
        raise PreconditionError("base is not an isometric subspace", F.points)
    cols = [(Z.index[p], v) for p, v in zip(F.points, u.values)]
    vals = tuple(
        min((trunc_add(row[i], v) for i, v in cols), default=ONE) for row in Z.dist
    )
    return KatetovFunction(Z, vals)


def katetov_map(
    f: Mapping, u: KatetovFunction, Y: FinMetricSpace
) -> KatetovFunction:
    """Push ``u`` forward along a 1-Lipschitz ``f: X -> Y``: image, then saturate."""
    X = u.base
    for a, b in itertools.combinations(X.points, 2):
        if Y.d(f[a], f[b]) > X.d(a, b):
            raise PreconditionError("map is not 1-Lipschitz", (a, b))
    image = map_image(f, u.as_greyset(), Y.points, "image")
    sat = saturate(Y.as_relation(), image)
    return KatetovFunction(Y, tuple(sat(p) for p in Y.points))


def density_witness(u: KatetovFunction, Y: FinMetricSpace, Z: FinMetricSpace) -> tuple[KatetovFunction, Fraction, Fraction]:
    """For ``u`` on ``X ⊆ Z`` and ``Y ⊆ Z``: ``v = d_Z[u]|Y``, the sup distance
    between ``d_Z[u]`` and ``d_Z[v]``, and the bound ``2·d_H(X, Y)``.

    The sup distance never exceeds the bound (truncated at 1).
    """
    ext = extend_support(u, Z)
    v = KatetovFunction(Y, tuple(ext(p) for p in Y.points))
    gap = katetov_distance(ext, extend_support(v, Z))
    bound = min(ONE, 2 * hausdorff_distance(Z, u.base.points, Y.points))
    return v, gap, bound


@dataclass(frozen=True)
class OnePointExtension:
    space: FinMetricSpace
    new_point: Hashable | None
    realized_by: Hashable | None


def one_point_extension(X: FinMetricSpace, u: KatetovFunction, name: Hashable = "*") -> OnePointExtension:
    if u.base.points != X.points:
        raise PreconditionError("u must be defined on all of X", u.base.points)
    is_katetov(u).raise_if_failed()
    for p in X.points:
        if u(p) == 0:
            return OnePointExtension(X, None, p)
    if name in X:
        raise PreconditionError("new point name already used", name)
    dist = [list(row) + [u.values[i]] for i, row in enumerate(X.dist)]
    dist.append(list(u.values) + [Fraction(0)])
    return OnePointExtension(FinMetricSpace(X.points + (name,), dist), name, None)


def _check_q(F: FinMetricSpace, q: int) -> None:
    if q < 1:
        raise PreconditionError("q must be a positive integer", q)
    if not F.denominators_divide(q):
        raise PreconditionError("distances are not q-rational", q)


def iter_katetov(F: FinMetricSpace, q: int) -> Iterator[KatetovFunction]:
    """Lexicographic enumeration of q-rational Katětov functions on ``F``."""
    _check_q(F, q)
    grid = [Fraction(k, q) for k in range(q + 1)]
    n = len(F)
    D = F.dist
    chosen: list = []

    def rec(i: int):
        if i == n:
            yield KatetovFunction(F, tuple(chosen))
            return
        row = D[i]
        for v in grid:
            if all(abs(v - chosen[j]) <= row[j] and v + chosen[j] >= row[j] for j in range(i)):
                chosen.append(v)
                yield from rec(i + 1)
                chosen.pop()

    yield from rec(0)


def enumerate_katetov(F: FinMetricSpace, q: int) -> list[KatetovFunction]:
    return list(iter_katetov(F, q))


# -- the tower ----------------------------------------------------------------------


@dataclass(frozen=True)
class UrysohnApprox:
    """Levels ``L_0 ⊆ L_1 ⊆ ...``; each level lists the previous one first.

    ``provenance[p] = (support, values)`` records which Katětov function
    created each non-seed point.  Inclusions are the identity on names; the
    index maps are stored explicitly for serialization.
    """

    q: int
    depth: int
    budget: int | None
    max_support: int | None
    levels: tuple
    provenance: Mapping = field(compare=False)
    exhausted: bool = False

    def inclusion(self, n: int) -> list[int]:
        lo, hi = self.levels[n], self.levels[n + 1]
        return [hi.index[p] for p in lo.points]

    @property
    def top(self) -> FinMetricSpace:
        return self.levels[-1]

    def params(self) -> tuple:
        return (self.q, self.depth, self.budget, self.max_support)

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "depth": self.depth,
            "budget": self.budget,
            "max_support": self.max_support,
            "exhausted": self.exhausted,
            "truncated_at_depth": self.depth,
            "levels": [L.to_json() for L in self.levels],
            "inclusions": [self.inclusion(n) for n in range(len(self.levels) - 1)],
            "provenance": {
                str(p): {
                    "support": [str(a) for a in supp],
                    "values": [fmt_rational(v) for v in vals],
                }
                for p, (supp, vals) in self.provenance.items()
            },
        }


def _supports(n: int, max_support: int | None) -> Iterator[tuple]:
    top = n if max_support is None else min(n, max_support)
    for size in range(top + 1):
        yield from itertools.combinations(range(n), size)


def _grow(L: FinMetricSpace, new: list) -> FinMetricSpace:
    """Add points realizing the given functions on ``L`` (sup metric among new points)."""
    n = len(L)
    pts = L.points + tuple(name for name, _ in new)
    dist = [list(row) + [w[i] for _, w in new] for i, row in enumerate(L.dist)]
    for _, w in new:
        dist.append(list(w) + [max(abs(a - b) for a, b in zip(w, w2)) if n else Fraction(0) for _, w2 in new])
    return FinMetricSpace(pts, dist, validate=False)


def urysohn_approx(
    seed: FinMetricSpace,
    q: int,
    depth: int,
    budget: int | None = None,
    max_support: int | None = None,
) -> UrysohnApprox:
    """Build the tower level by level in a fixed order.

    Supports are taken smallest first, then lexicographically by index;
    functions in lexicographic order.  A function already realized on the
    current level (or by an earlier new point) adds nothing.  When the point
    budget runs out the partial tower is returned with ``exhausted=True``.
    """
    _check_q(seed, q)
    levels = [seed]
    provenance: dict = {}
    exhausted = False
    for n in range(depth):
        L = levels[-1]
        known = {L.dist[i]: p for i, p in enumerate(L.points)}
        new: list = []
        for combo in _supports(len(L), max_support):
            F = L.subspace(L.points[i] for i in combo)
            for u in iter_katetov(F, q):
                w = extend_support(u, L).values
                if w in known:
                    continue
                if budget is not None and len(L) + len(new) >= budget:
                    exhausted = True
                    break
                name = f"p{n + 1}.{len(new)}"
                known[w] = name
                new.append((name, w))
                provenance[name] = (F.points, u.values)
            if exhausted:
                break
        levels.append(_grow(L, new))
        if exhausted:
            break
    return UrysohnApprox(q, depth, budget, max_support, tuple(levels), provenance, exhausted)


def extension_property_check(
    tower: UrysohnApprox, n: int, target_level: int | None = None
) -> Verdict:
    """Every q-rational Katětov function over a (support-bounded) subset of
    level ``n`` must be realized exactly in ``target_level`` (default n+1)."""
    target_level = n + 1 if target_level is None else target_level
    if target_level >= len(tower.levels) or target_level < n:
        raise PreconditionError("target level not built", target_level)
    L, M = tower.levels[n], tower.levels[target_level]
    for combo in _supports(len(L), tower.max_support):
        F = L.subspace(L.points[i] for i in combo)
        cols = [M.index[p] for p in F.points]
        realized = {tuple(row[c] for c in cols) for row in M.dist}
        for u in iter_katetov(F, tower.q):
            if u.values not in realized:
                return Verdict.reject("unrealized Katětov function", (F.points, u.values))
    return Verdict.accept()


# -- approximate-to-exact extension ----------------------------------------------------


@dataclass(frozen=True)
class ExtensionResult:
    point: Hashable
    settled_at: int
    stages: int
    iterates: tuple


def exact_extension(
    X: FinMetricSpace,
    sections: Sequence[Hashable],
    F: Sequence[Hashable],
    u: KatetovFunction,
) -> ExtensionResult:
    """Find a point of ``X`` realizing ``u`` by the successive-approximation
    iteration: stage n keeps ``|u(a) - d(T_n, a)| <= 2^-n`` on ``F``.

    Iteration stops once ``2^-n`` is below both the least positive distance
    of ``X`` and the least positive gap ``|u(a) - d(x, a)|``; from then on the
    iterate is exact and cannot move.
    """
    F = tuple(F)
    if tuple(u.base.points) != F:
        raise PreconditionError("u must be defined on F", u.base.points)
    if not u.base.is_subspace_of(X):
        raise PreconditionError("F is not a subspace of X", F)
    is_katetov(u).raise_if_failed()
    if not sections:
        raise PreconditionError("no sections to search", ())
    gaps = [abs(u(a) - X.d(x, a)) for x in X.points for a in F]
    positive = [g for g in gaps if g > 0]
    least = X.least_positive_distance()
    if least is not None:
        positive.append(least)
    floor = min(positive, default=ONE)

    T = sections[0]
    iterates = [T]
    n = 0
    while Fraction(1, 2**n) >= floor:
        for a in F:
            assert abs(u(a) - X.d(T, a)) <= Fraction(1, 2**n)
        if T in F:
            aux = {a: u(a) for a in F}
        else:
            aux = {a: u(a) for a in F}
            aux[T] = max((abs(u(b) - X.d(T, b)) for b in F), default=Fraction(0))
        tol = Fraction(1, 2 ** (n + 1))
        nxt = next(
            (s for s in sections if all(abs(v - X.d(s, a)) <= tol for a, v in aux.items())),
            None,
        )
        if nxt is None:
            raise PreconditionError(
                "approximate extension property fails", (tol, tuple(aux.items()))
            )
        T = nxt
        iterates.append(T)
        n += 1
    if any(X.d(T, a) != u(a) for a in F):
        raise AssertionError("iteration ended on a non-realizer")
    settled = len(iterates) - 1
    while settled > 0 and iterates[settled - 1] == T:
        settled -= 1
    return ExtensionResult(T, settled, n, tuple(iterates))


# -- functoriality along towers --------------------------------------------------------------


@dataclass(frozen=True)
class TowerMap:
    level_maps: tuple
    unique: tuple


def tower_map(f: Mapping, tX: UrysohnApprox, tY: UrysohnApprox) -> TowerMap:
    """Transport an isometry of seeds level by level through both towers.

    Each new point of X is sent to the point of Y created from the transported
    provenance record ``(f(F), u ∘ f^-1)``.  Every level map is checked to be
    an isometric bijection extending the previous one, and to be the only
    such extension.
    """
    if tX.params() != tY.params():
        raise PreconditionError("tower parameters differ", (tX.params(), tY.params()))
    if len(tX.levels) != len(tY.levels):
        raise PreconditionError("towers have different heights", (len(tX.levels), len(tY.levels)))
    X0, Y0 = tX.levels[0], tY.levels[0]
    if set(f) != set(X0.points) or len(set(f.values())) != len(X0):
        raise PreconditionError("seed map is not a bijection", dict(f))
    check_partial_isometry(X0, Y0, f).raise_if_failed()
    maps = [dict(f)]
    unique = []
    for n in range(len(tX.levels) - 1):
        LX, LY = tX.levels[n], tY.levels[n]
        MX, MY = tX.levels[n + 1], tY.levels[n + 1]
        fn = maps[-1]
        lookup = {tuple(MY.d(p, y) for y in LY.points): p for p in MY.points}
        nxt = dict(fn)
        for p in MX.points[len(LX):]:
            supp, vals = tX.provenance[p]
            moved = LY.subspace(fn[a] for a in supp)
            w = extend_support(KatetovFunction(moved, vals), LY).values
            direct = tuple(MX.d(p, x) for x in _preimage_order(fn, LY))
            if w != direct:
                raise AssertionError("provenance transport disagrees with direct transport")
            if w not in lookup:
                raise PreconditionError("transported function not realized in target tower", (p, w))
            nxt[p] = lookup[w]
        if len(set(nxt.values())) != len(MX) or len(MX) != len(MY):
            raise PreconditionError("level map is not a bijection", n + 1)
        check_partial_isometry(MX, MY, nxt).raise_if_failed(AssertionError)
        extensions = list(itertools.islice(iter_isometries(MX, MY, fn), 2))
        unique.append(len(extensions) == 1 and extensions[0] == nxt)
        maps.append(nxt)
    return TowerMap(tuple(maps), tuple(unique))


def _preimage_order(fn: Mapping, LY: FinMetricSpace) -> list:
    inv = {v: k for k, v in fn.items()}
    return [inv[y] for y in LY.points]
