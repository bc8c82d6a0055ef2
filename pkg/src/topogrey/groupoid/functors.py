"""Functors between finite groupoids; fullness, faithfulness, and inverse equivalences."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from ..errors import Verdict
from .core import FinGroupoid


@dataclass(frozen=True)
class FinFunctor:
    """``mor[g]`` for every morphism; objects travel as their unit morphisms."""

    source: FinGroupoid
    target: FinGroupoid
    mor: tuple

    @property
    def obj(self) -> dict:
        return {x: self.mor[x] for x in self.source.objects}


def check_functor(F: FinFunctor) -> Verdict:
    G, H = F.source, F.target
    if len(F.mor) != len(G):
        return Verdict.reject("morphism map is not total", (len(F.mor),))
    for x in G.objects:
        if not H.is_unit(F.mor[x]):
            return Verdict.reject("units not preserved", (G.names[x],))
    for g in G.morphisms:
        Fg = F.mor[g]
        if H.src[Fg] != F.mor[G.src[g]] or H.tgt[Fg] != F.mor[G.tgt[g]]:
            return Verdict.reject("source/target not preserved", (G.names[g],))
    for g in G.morphisms:
        for h in G.morphisms:
            c = G.table[g][h]
            if c is not None and F.mor[c] != H.mul(F.mor[g], F.mor[h]):
                return Verdict.reject("composition not preserved", (G.names[g], G.names[h]))
    return Verdict.accept()


def identity_functor(G: FinGroupoid) -> FinFunctor:
    return FinFunctor(G, G, tuple(G.morphisms))


def compose_functors(F2: FinFunctor, F1: FinFunctor) -> FinFunctor:
    """``F2 ∘ F1``."""
    return FinFunctor(F1.source, F2.target, tuple(F2.mor[F1.mor[g]] for g in F1.source.morphisms))


@dataclass(frozen=True)
class FunctorAnalysis:
    full: bool
    faithful: bool
    essentially_surjective: bool
    witnesses: Mapping = field(default_factory=dict)
    inverse: FinFunctor | None = None
    counit: Mapping | None = None   # y -> α(y): F(F'(y)) -> y
    unit: Mapping | None = None     # x -> β(x): x -> F'(F(x))

    @property
    def equivalence(self) -> bool:
        return self.full and self.faithful and self.essentially_surjective


def functor_analysis(F: FinFunctor, build_inverse: bool = True) -> FunctorAnalysis:
    """Flags by exhaustive hom-set comparison; inverse equivalence when all hold.

    The inverse picks, for each target object ``y``, the least source object
    ``x_y`` with ``F(x_y) = y`` (and ``h_y`` the unit), falling back to the
    least ``x_y`` with ``F(x_y) ≅ y`` and the least such iso ``h_y``.
    """
    check_functor(F).raise_if_failed()
    G, H = F.source, F.target
    full = faithful = True
    wit: dict = {}
    for x in G.objects:
        for y in G.objects:
            homs = G.hom(x, y)
            images = [F.mor[g] for g in homs]
            if faithful and len(set(images)) != len(images):
                faithful = False
                wit["not_faithful"] = (G.names[x], G.names[y])
            if full and set(images) != set(H.hom(F.mor[x], F.mor[y])):
                full = False
                wit["not_full"] = (G.names[x], G.names[y])
    choice: dict = {}
    for x in G.objects:
        choice.setdefault(F.mor[x], (x, F.mor[x]))
    for y in H.objects:
        if y in choice:
            continue
        for x in G.objects:
            hs = H.hom(F.mor[x], y)
            if hs:
                choice[y] = (x, hs[0])
                break
    missing = [y for y in H.objects if y not in choice]
    ess = not missing
    if missing:
        wit["not_essentially_surjective"] = H.names[missing[0]]
    if not (full and faithful and ess and build_inverse):
        return FunctorAnalysis(full, faithful, ess, wit)

    def pull(x: int, x2: int, k: int) -> int:
        for g in G.hom(x, x2):
            if F.mor[g] == k:
                return g
        raise AssertionError("fullness failed during inverse construction")

    mor = []
    for h in H.morphisms:
        y, y2 = H.src[h], H.tgt[h]
        (x, hy), (x2, hy2) = choice[y], choice[y2]
        mor.append(pull(x, x2, H.mul(H.mul(H.inv[hy2], h), hy)))
    inverse = FinFunctor(H, G, tuple(mor))
    check_functor(inverse).raise_if_failed(AssertionError)
    counit = {y: choice[y][1] for y in H.objects}
    unit = {}
    for x in G.objects:
        Fx = F.mor[x]
        xx, hF = choice[Fx]
        unit[x] = pull(x, xx, H.inv[hF])
    # counit: α(y')·F(F'(h)) = h·α(y)
    for h in H.morphisms:
        y, y2 = H.src[h], H.tgt[h]
        if H.mul(counit[y2], F.mor[inverse.mor[h]]) != H.mul(h, counit[y]):
            raise AssertionError("counit square fails")
    # unit: β(x')·g = F'(F(g))·β(x)
    for g in G.morphisms:
        x, x2 = G.src[g], G.tgt[g]
        if G.mul(unit[x2], g) != G.mul(inverse.mor[F.mor[g]], unit[x]):
            raise AssertionError("unit square fails")
    return FunctorAnalysis(full, faithful, ess, wit, inverse, counit, unit)
