"""Finite rational metric spaces of diameter at most 1."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Hashable, Iterator, Mapping, Sequence

from .errors import PreconditionError, Verdict
from .greycore import GreyRelation, fmt_rational, parse_rational, r01, trunc_add


def validate_metric(points: Sequence[Hashable], dist: Sequence[Sequence[Fraction]]) -> Verdict:
    """Check a raw distance table; witnesses are point tuples."""
    n = len(points)
    if len(set(points)) != n:
        return Verdict.reject("repeated point", tuple(points))
    if len(dist) != n or any(len(row) != n for row in dist):
        return Verdict.reject("distance table has the wrong shape", (n,))
    for i in range(n):
        for j in range(n):
            v = dist[i][j]
            if v < 0 or v > 1:
                return Verdict.reject("distance outside [0, 1]", (points[i], points[j]))
    for i in range(n):
        if dist[i][i] != 0:
            return Verdict.reject("reflexivity", (points[i],))
        for j in range(i + 1, n):
            if dist[i][j] != dist[j][i]:
                return Verdict.reject("symmetry", (points[i], points[j]))
            if dist[i][j] == 0:
                return Verdict.reject("strictness", (points[i], points[j]))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if dist[i][k] > dist[i][j] + dist[j][k]:
                    return Verdict.reject("triangle", (points[i], points[k], points[j]))
    return Verdict.accept()


class FinMetricSpace:
    """Points in a fixed order and a dense symmetric table of exact distances.

    Construction validates; an invalid table raises ``PreconditionError``
    carrying the witness from :func:`validate_metric`.
    """

    __slots__ = ("points", "dist", "index")

    def __init__(self, points: Sequence[Hashable], dist: Sequence[Sequence], validate: bool = True):
        self.points = tuple(points)
        self.dist = tuple(tuple(r01(v) for v in row) for row in dist)
        self.index = {p: i for i, p in enumerate(self.points)}
        if validate:
            validate_metric(self.points, self.dist).raise_if_failed()

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, p) -> bool:
        return p in self.index

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinMetricSpace):
            return NotImplemented
        return self.points == other.points and self.dist == other.dist

    def __hash__(self):
        return hash((self.points, self.dist))

    def __repr__(self) -> str:
        return f"FinMetricSpace({len(self.points)} points)"

    def d(self, p, q) -> Fraction:
        return self.dist[self.index[p]][self.index[q]]

    def row(self, p) -> tuple:
        return self.dist[self.index[p]]

    def subspace(self, pts) -> "FinMetricSpace":
        pts = tuple(pts)
        idx = [self.index[p] for p in pts]
        return FinMetricSpace(pts, [[self.dist[i][j] for j in idx] for i in idx], validate=False)

    def is_subspace_of(self, other: "FinMetricSpace") -> bool:
        return all(p in other for p in self.points) and all(
            self.d(p, q) == other.d(p, q) for p in self.points for q in self.points
        )

    def as_relation(self) -> GreyRelation:
        return GreyRelation.from_function(self.points, self.points, self.d)

    def least_positive_distance(self) -> Fraction | None:
        vals = [v for row in self.dist for v in row if v > 0]
        return min(vals) if vals else None

    def denominators_divide(self, q: int) -> bool:
        return all(q % v.denominator == 0 for row in self.dist for v in row)

    def to_json(self) -> dict:
        return {
            "points": [str(p) for p in self.points],
            "dist": [[fmt_rational(v) for v in row] for row in self.dist],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "FinMetricSpace":
        return cls(data["points"], [[parse_rational(v) for v in row] for row in data["dist"]])

    @classmethod
    def from_function(cls, points, fn) -> "FinMetricSpace":
        points = tuple(points)
        return cls(points, [[fn(p, q) for q in points] for p in points])


def sum_product(X: FinMetricSpace, Y: FinMetricSpace) -> FinMetricSpace:
    """``X × Y`` with the truncated sum metric; points are pairs, row-major."""
    pts = [(x, y) for x in X.points for y in Y.points]
    return FinMetricSpace(
        pts,
        [[trunc_add(X.d(a, c), Y.d(b, e)) for (c, e) in pts] for (a, b) in pts],
    )


def hausdorff_distance(Z: FinMetricSpace, A, B) -> Fraction:
    A, B = list(A), list(B)
    if not A or not B:
        raise PreconditionError("Hausdorff distance of an empty subset", (tuple(A), tuple(B)))
    ab = max(min(Z.d(a, b) for b in B) for a in A)
    ba = max(min(Z.d(a, b) for a in A) for b in B)
    return max(ab, ba)


# -- isometries -------------------------------------------------------------------


def check_partial_isometry(X: FinMetricSpace, Y: FinMetricSpace, pairing: Mapping) -> Verdict:
    if len(set(pairing.values())) != len(pairing):
        return Verdict.reject("pairing is not injective", dict(pairing))
    for a, b in pairing.items():
        if a not in X or b not in Y:
            return Verdict.reject("pairing leaves the spaces", (a, b))
    items = list(pairing.items())
    for (a, b), (c, e) in itertools.combinations(items, 2):
        if X.d(a, c) != Y.d(b, e):
            return Verdict.reject("distance not preserved", ((a, b), (c, e)))
    return Verdict.accept()


def _profile(S: FinMetricSpace, i: int) -> tuple:
    return tuple(sorted(S.dist[i]))


def iter_isometries(
    X: FinMetricSpace, Y: FinMetricSpace, seed: Mapping | None = None
) -> Iterator[dict]:
    """All isometric bijections ``X -> Y`` extending ``seed``, deterministically.

    Back-and-forth: even steps take the lowest unmatched point of X and try
    partners in Y, odd steps take the lowest unmatched point of Y and try
    partners in X.  Candidates must agree exactly on distances to every
    matched pair and on their sorted distance profile.
    """
    seed = dict(seed or {})
    check_partial_isometry(X, Y, seed).raise_if_failed()
    n = len(X)
    if n != len(Y):
        return
    if sorted(v for r in X.dist for v in r) != sorted(v for r in Y.dist for v in r):
        return
    px = [_profile(X, i) for i in range(n)]
    py = [_profile(Y, j) for j in range(n)]
    fwd = {X.index[a]: Y.index[b] for a, b in seed.items()}
    for i, j in fwd.items():
        if px[i] != py[j]:
            return
    bwd = {j: i for i, j in fwd.items()}

    def compatible(i: int, j: int) -> bool:
        if px[i] != py[j]:
            return False
        xi, yj = X.dist[i], Y.dist[j]
        return all(xi[a] == yj[b] for a, b in fwd.items())

    def search(step: int) -> Iterator[dict]:
        if len(fwd) == n:
            yield {X.points[i]: Y.points[j] for i, j in sorted(fwd.items())}
            return
        forth = step % 2 == 0
        if forth:
            i = next(k for k in range(n) if k not in fwd)
            options = [(i, j) for j in range(n) if j not in bwd]
        else:
            j = next(k for k in range(n) if k not in bwd)
            options = [(i, j) for i in range(n) if i not in fwd]
        for i, j in options:
            if compatible(i, j):
                fwd[i] = j
                bwd[j] = i
                yield from search(step + 1)
                del fwd[i]
                del bwd[j]

    yield from search(0)


def find_isometry(X: FinMetricSpace, Y: FinMetricSpace, seed: Mapping | None = None) -> dict | None:
    return next(iter_isometries(X, Y, seed), None)


def brute_force_isometries(X: FinMetricSpace, Y: FinMetricSpace) -> list[dict]:
    """Reference oracle: filter every bijection.  Only for tiny spaces."""
    if len(X) != len(Y):
        return []
    out = []
    for perm in itertools.permutations(Y.points):
        f = dict(zip(X.points, perm))
        if all(X.d(a, b) == Y.d(f[a], f[b]) for a in X.points for b in X.points):
            out.append(f)
    return out
