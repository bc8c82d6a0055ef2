"""Exact grey subsets and grey relations over finite carriers.

Values live in the unit interval with the *reversed* order: 0 is full
membership, 1 is none.  Union is pointwise ``min``, intersection pointwise
``max``, and composition of relations is min-plus with truncation at 1.
Everything is a :class:`fractions.Fraction`; nothing here touches floats.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

from .errors import CarrierMismatch, PreconditionError, Verdict

ZERO = Fraction(0)
ONE = Fraction(1)

Point = Hashable


# -- the value semiring -----------------------------------------------------


def r01(x: Any) -> Fraction:
    """Coerce ``x`` (int, Fraction, or "p/q" string) to a rational in [0, 1]."""
    if isinstance(x, str):
        x = parse_rational(x)
    r = Fraction(x)
    if r < 0 or r > 1:
        raise ValueError(f"{r} is outside [0, 1]")
    return r


def parse_rational(s: str) -> Fraction:
    s = s.strip()
    if "/" in s:
        num, den = s.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(s))


def fmt_rational(r: Fraction) -> str:
    """Serialize as "num/den", always with an explicit denominator."""
    r = Fraction(r)
    return f"{r.numerator}/{r.denominator}"


def trunc_add(r: Fraction, s: Fraction) -> Fraction:
    return min(ONE, r + s)


def trunc_sub(r: Fraction, s: Fraction) -> Fraction:
    return max(ZERO, r - s)


def inf(values: Iterable[Fraction]) -> Fraction:
    """Infimum with the empty-infimum convention (= 1)."""
    return min(values, default=ONE)


def sup(values: Iterable[Fraction]) -> Fraction:
    return max(values, default=ZERO)


# -- grey subsets -------------------------------------------------------------


@dataclass(frozen=True)
class GreySet:
    carrier: tuple
    values: Mapping[Point, Fraction] = field(compare=False)

    def __post_init__(self):
        carrier = tuple(self.carrier)
        if len(set(carrier)) != len(carrier):
            raise ValueError("carrier has repeated points")
        missing = [x for x in carrier if x not in self.values]
        if missing:
            raise ValueError(f"grey set not total: no value at {missing[0]!r}")
        extra = set(self.values) - set(carrier)
        if extra:
            raise CarrierMismatch("values outside the carrier", next(iter(extra)))
        object.__setattr__(self, "carrier", carrier)
        object.__setattr__(self, "values", {x: r01(self.values[x]) for x in carrier})

    def __call__(self, x: Point) -> Fraction:
        return self.values[x]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GreySet):
            return NotImplemented
        return self.carrier == other.carrier and self.values == other.values

    def __hash__(self):
        return hash((self.carrier, tuple(self.values[x] for x in self.carrier)))

    def __repr__(self) -> str:
        body = ", ".join(f"{x!r}: {fmt_rational(v)}" for x, v in self.values.items())
        return f"GreySet({{{body}}})"

    @classmethod
    def zero_indicator(cls, carrier: Sequence[Point], subset: Iterable[Point]) -> "GreySet":
        subset = set(subset)
        return cls(tuple(carrier), {x: ZERO if x in subset else ONE for x in carrier})

    @classmethod
    def constant(cls, carrier: Sequence[Point], r: Any) -> "GreySet":
        r = r01(r)
        return cls(tuple(carrier), {x: r for x in carrier})

    @classmethod
    def from_function(cls, carrier: Sequence[Point], fn: Callable[[Point], Any]) -> "GreySet":
        return cls(tuple(carrier), {x: fn(x) for x in carrier})

    def is_crisp(self) -> bool:
        return all(v in (ZERO, ONE) for v in self.values.values())

    def support(self) -> frozenset:
        """The underlying subset of a zero-indicator (points with value 0)."""
        return frozenset(x for x in self.carrier if self.values[x] == 0)

    def below(self, other: "GreySet") -> bool:
        """``self ⊑ other``, i.e. ``self(x) >= other(x)`` everywhere."""
        _same_carrier(self, other)
        return all(self.values[x] >= other.values[x] for x in self.carrier)

    def restrict(self, points: Iterable[Point]) -> "GreySet":
        pts = tuple(points)
        return GreySet(pts, {x: self.values[x] for x in pts})

    def map_values(self, fn: Callable[[Fraction], Fraction]) -> "GreySet":
        return GreySet(self.carrier, {x: fn(v) for x, v in self.values.items()})

    def to_json(self) -> dict:
        return {
            "carrier": [str(x) for x in self.carrier],
            "values": {str(x): fmt_rational(self.values[x]) for x in self.carrier},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "GreySet":
        carrier = tuple(data["carrier"])
        return cls(carrier, {x: parse_rational(data["values"][x]) for x in carrier})


def _same_carrier(A: GreySet, B: GreySet) -> None:
    if A.carrier != B.carrier:
        raise CarrierMismatch("grey sets live on different carriers", (A.carrier, B.carrier))


_BINARY = {
    "union": min,
    "intersection": max,
    "add": trunc_add,
}
_SHIFT = {
    "shift_add": trunc_add,
    "shift_sub": trunc_sub,
}


def pointwise_ops(A: GreySet, B: GreySet | None, op: str, r: Any = None) -> GreySet:
    """Apply a lattice or truncated-arithmetic operation pointwise.

    ``op`` is one of union, intersection, add (binary), or shift_add,
    shift_sub (unary, taking the shift amount ``r``).
    """
    if op in _BINARY:
        if B is None:
            raise TypeError(f"{op} needs two operands")
        _same_carrier(A, B)
        f = _BINARY[op]
        return GreySet(A.carrier, {x: f(A(x), B(x)) for x in A.carrier})
    if op in _SHIFT:
        f = _SHIFT[op]
        r = r01(r)
        return GreySet(A.carrier, {x: f(A(x), r) for x in A.carrier})
    raise ValueError(f"unknown operation {op!r}")


def union(A: GreySet, B: GreySet) -> GreySet:
    return pointwise_ops(A, B, "union")


def intersection(A: GreySet, B: GreySet) -> GreySet:
    return pointwise_ops(A, B, "intersection")


def grey_add(A: GreySet, B: GreySet) -> GreySet:
    return pointwise_ops(A, B, "add")


def sublevel(A: GreySet, r: Any, mode: str = "strict") -> frozenset:
    """``A_{<r}`` (strict) or ``A_{<=r}`` (weak) as an ordinary subset."""
    r = Fraction(r)
    if mode == "strict":
        return frozenset(x for x in A.carrier if A(x) < r)
    if mode == "weak":
        return frozenset(x for x in A.carrier if A(x) <= r)
    raise ValueError(f"unknown mode {mode!r}")


def map_image(
    f: Mapping[Point, Point],
    A: GreySet,
    other: Sequence[Point],
    direction: str = "image",
) -> GreySet:
    """Grey image or preimage along a point map ``f: X -> Y``.

    For ``image``, ``A`` lives on X and ``other`` is Y; the result is the
    fiberwise infimum (1 on empty fibers).  For ``preimage``, ``A`` lives on
    Y, ``other`` is X, and the result is ``A ∘ f``.
    """
    if direction == "image":
        missing = [x for x in A.carrier if x not in f]
        if missing:
            raise PreconditionError("map not total on the domain", missing[0])
        best: dict = {y: ONE for y in other}
        for x in A.carrier:
            y = f[x]
            if y not in best:
                raise CarrierMismatch("map leaves the target carrier", (x, y))
            if A(x) < best[y]:
                best[y] = A(x)
        return GreySet(tuple(other), best)
    if direction == "preimage":
        return GreySet(tuple(other), {x: A(f[x]) for x in other})
    raise ValueError(f"unknown direction {direction!r}")


def grey_oplus(A: GreySet, B: GreySet) -> GreySet:
    """``A ⊕ B ⊑ X × Y`` with value ``A(x) +̇ B(y)``; carrier ordered row-major."""
    carrier = tuple((x, y) for x in A.carrier for y in B.carrier)
    return GreySet(carrier, {(x, y): trunc_add(A(x), B(y)) for x, y in carrier})


# -- grey relations -------------------------------------------------------------


@dataclass(frozen=True)
class GreyRelation:
    source: tuple
    target: tuple
    values: Mapping[tuple, Fraction] = field(compare=False)

    def __post_init__(self):
        src, tgt = tuple(self.source), tuple(self.target)
        vals = {}
        for x in src:
            for y in tgt:
                try:
                    vals[(x, y)] = r01(self.values[(x, y)])
                except KeyError:
                    raise ValueError(f"relation not total: no value at {(x, y)!r}") from None
        if len(vals) != len(self.values):
            raise CarrierMismatch("values outside source x target")
        object.__setattr__(self, "source", src)
        object.__setattr__(self, "target", tgt)
        object.__setattr__(self, "values", vals)

    def __call__(self, x: Point, y: Point) -> Fraction:
        return self.values[(x, y)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GreyRelation):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.values == other.values
        )

    def __hash__(self):
        return hash((self.source, self.target, tuple(self.values.values())))

    def __repr__(self) -> str:
        return f"GreyRelation({len(self.source)}x{len(self.target)})"

    @classmethod
    def from_function(cls, source, target, fn: Callable[[Point, Point], Any]) -> "GreyRelation":
        source, target = tuple(source), tuple(target)
        return cls(source, target, {(x, y): fn(x, y) for x in source for y in target})

    @classmethod
    def diagonal(cls, carrier: Sequence[Point]) -> "GreyRelation":
        """Zero-indicator of the diagonal: the identity for ``rel_compose``."""
        return cls.from_function(carrier, carrier, lambda x, y: ZERO if x == y else ONE)

    @classmethod
    def constant(cls, source, target, r: Any) -> "GreyRelation":
        r = r01(r)
        return cls.from_function(source, target, lambda x, y: r)

    def is_square(self) -> bool:
        return self.source == self.target

    def is_crisp(self) -> bool:
        return all(v in (ZERO, ONE) for v in self.values.values())

    def below(self, other: "GreyRelation") -> bool:
        """``self ⊑ other`` pointwise (reversed order)."""
        if (self.source, self.target) != (other.source, other.target):
            raise CarrierMismatch("relations on different carriers")
        return all(self.values[k] >= other.values[k] for k in self.values)

    def as_greyset(self) -> GreySet:
        return GreySet(tuple(self.values), self.values)

    def to_json(self) -> dict:
        return {
            "source": [str(x) for x in self.source],
            "target": [str(y) for y in self.target],
            "values": {
                str(x): {str(y): fmt_rational(self(x, y)) for y in self.target}
                for x in self.source
            },
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "GreyRelation":
        src, tgt = tuple(data["source"]), tuple(data["target"])
        rows = data["values"]
        return cls.from_function(src, tgt, lambda x, y: parse_rational(rows[x][y]))


def rel_inverse(R: GreyRelation) -> GreyRelation:
    return GreyRelation.from_function(R.target, R.source, lambda y, x: R(x, y))


def rel_image(R: GreyRelation, A: GreySet) -> GreySet:
    """``R[A](y) = inf_x (R(x, y) +̇ A(x))``."""
    if A.carrier != R.source:
        raise CarrierMismatch("grey set is not on the relation's source", (A.carrier, R.source))
    return GreySet(
        R.target,
        {y: inf(trunc_add(R(x, y), A(x)) for x in R.source) for y in R.target},
    )


def rel_compose(S: GreyRelation, R: GreyRelation) -> GreyRelation:
    """``(S ⊙ R)(x, z) = inf_y (R(x, y) +̇ S(y, z))`` for R ⊑ X×Y, S ⊑ Y×Z."""
    if R.target != S.source:
        raise CarrierMismatch("middle carriers differ", (R.target, S.source))
    mid = R.target
    return GreyRelation.from_function(
        R.source,
        S.target,
        lambda x, z: inf(trunc_add(R(x, y), S(y, z)) for y in mid),
    )


def pseudometric_check(d: GreyRelation) -> Verdict:
    """Accept iff ``d`` is reflexive, symmetric and satisfies the triangle law.

    Failure witnesses: ``(x,)`` for reflexivity, ``(x, y)`` for symmetry and
    ``(x, y, z)`` with ``d(x, z) > d(x, y) + d(y, z)`` for the triangle.
    """
    if not d.is_square():
        return Verdict.reject("relation is not square", (d.source, d.target))
    pts = d.source
    for x in pts:
        if d(x, x) != 0:
            return Verdict.reject("reflexivity", (x,))
    for i, x in enumerate(pts):
        for y in pts[i + 1:]:
            if d(x, y) != d(y, x):
                return Verdict.reject("symmetry", (x, y))
    for x in pts:
        for y in pts:
            dxy = d(x, y)
            for z in pts:
                if d(x, z) > dxy + d(y, z):
                    return Verdict.reject("triangle", (x, y, z))
    return Verdict.accept()


def saturate(d: GreyRelation, A: GreySet) -> GreySet:
    """The ``d``-saturation ``[A] = d[A]``."""
    return rel_image(d, A)


def is_invariant(d: GreyRelation, A: GreySet) -> bool:
    return saturate(d, A) == A


def metric_quotient(d: GreyRelation):
    """Collapse a pseudometric to a metric space.

    Returns ``(space, projection)``.  Each class is named by its first member
    in carrier order; ``projection`` maps every point to that name.
    """
    from .finmetric import FinMetricSpace

    pseudometric_check(d).raise_if_failed()
    reps: list = []
    projection: dict = {}
    for x in d.source:
        for r in reps:
            if d(x, r) == 0:
                projection[x] = r
                break
        else:
            reps.append(x)
            projection[x] = x
    space = FinMetricSpace(tuple(reps), [[d(a, b) for b in reps] for a in reps])
    return space, projection
