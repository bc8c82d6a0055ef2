"""Left cosets of subgroupoids and right-multiplication maps between them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from ..errors import PreconditionError, Verdict
from .core import FinGroupoid, is_subgroupoid


@dataclass(frozen=True)
class CosetSpace:
    """``G/U``: classes of ``σ⁻¹(U⁰)`` under ``g⁻¹h ∈ U``.

    Classes are numbered by their least morphism.  ``unit_section[x]`` is the
    class of the unit ``x`` for each ``x ∈ U⁰``.
    """

    G: FinGroupoid
    U: frozenset
    classes: tuple
    class_of: Mapping
    tau: tuple
    unit_section: Mapping

    def fiber(self, x: int) -> tuple:
        return tuple(c for c, t in enumerate(self.tau) if t == x)

    def act(self, k: int, c: int) -> int:
        """Left action ``k·(gU) = (k·g)U``."""
        g = min(self.classes[c])
        return self.class_of[self.G.mul(k, g)]

    def section_of(self, S: Iterable[int]) -> frozenset:
        """Class indices covered by a U-invariant set."""
        return frozenset(self.class_of[s] for s in S)


def coset_space(G: FinGroupoid, U: Iterable[int]) -> CosetSpace:
    U = frozenset(U)
    is_subgroupoid(G, U).raise_if_failed()
    units = G.units_of(U)
    domain = G.with_source(units)
    class_of: dict = {}
    classes: list = []
    for g in domain:
        if g in class_of:
            continue
        members = frozenset(
            h for h in domain if G.tgt[h] == G.tgt[g] and G.mul(G.inv[g], h) in U
        )
        for h in members:
            class_of[h] = len(classes)
        classes.append(members)
    tau = tuple(G.tgt[min(c)] for c in classes)
    unit_section = {x: class_of[x] for x in sorted(units)}
    C = CosetSpace(G, U, tuple(classes), class_of, tau, unit_section)
    _check_left_action(C)
    return C


def _check_left_action(C: CosetSpace) -> None:
    G = C.G
    for c, members in enumerate(C.classes):
        for k in G.morphisms:
            if G.src[k] != C.tau[c]:
                continue
            images = {C.class_of[G.mul(k, g)] for g in members}
            if len(images) != 1:
                raise AssertionError("left action not well defined on cosets")
        if C.act(C.tau[c], c) != c:
            raise AssertionError("unit does not act trivially on cosets")


def check_section(G: FinGroupoid, V: frozenset, S: Iterable[int]) -> Verdict:
    """``S ⊆ σ⁻¹(V⁰)``, V-invariant (``S·V = S``) and V-small (``S⁻¹·S ⊆ V``)."""
    S = frozenset(S)
    units = G.units_of(V)
    for s in sorted(S):
        if G.src[s] not in units:
            return Verdict.reject("section leaves the source fiber of V", (G.names[s],))
    SV = G.product(S, V)
    extra = sorted(SV - S)
    if extra:
        return Verdict.reject("not V-invariant", (G.names[extra[0]],))
    for s in sorted(S):
        for t in sorted(S):
            c = G.table[G.inv[s]][t]
            if c is not None and c not in V:
                return Verdict.reject("not V-small", (G.names[s], G.names[t]))
    return Verdict.accept()


def right_mult_map(
    G: FinGroupoid,
    U: Iterable[int] | CosetSpace,
    V: Iterable[int] | CosetSpace,
    S: Iterable[int],
) -> dict:
    """``gU ↦ gS`` as a dict from class indices of G/U to class indices of G/V.

    Raises ``PreconditionError`` with a witness when S is not a V-section or
    ``U ⊄ S·S⁻¹``.  Well-definedness and left equivariance are verified.
    """
    CU = U if isinstance(U, CosetSpace) else coset_space(G, U)
    CV = V if isinstance(V, CosetSpace) else coset_space(G, V)
    S = frozenset(S)
    check_section(G, CV.U, S).raise_if_failed()
    SS = G.product(S, G.inverse_set(S))
    for u in sorted(CU.U):
        if u not in SS:
            raise PreconditionError("U is not contained in S·S⁻¹", G.names[u])
    by_target: dict = {}
    for s in S:
        by_target.setdefault(G.tgt[s], s)
    out: dict = {}
    for c, members in enumerate(CU.classes):
        images = set()
        for g in members:
            s = by_target.get(G.src[g])
            if s is None:
                raise AssertionError("no section point over the source of a coset member")
            images.add(CV.class_of[G.mul(g, s)])
        if len(images) != 1:
            raise AssertionError("right multiplication is not well defined")
        out[c] = images.pop()
    for c in out:
        for k in G.morphisms:
            if G.src[k] == CU.tau[c] and out[CU.act(k, c)] != CV.act(k, out[c]):
                raise AssertionError("right multiplication is not left equivariant")
    return out


def projection(G: FinGroupoid, CU: CosetSpace, CV: CosetSpace) -> dict:
    """``π_{U,V}`` for ``U ⊆ V``."""
    if not CU.U <= CV.U:
        raise PreconditionError("projection needs U ⊆ V", sorted(CU.U - CV.U))
    return right_mult_map(G, CU, CV, CV.U)


def all_cosets(C: CosetSpace) -> list[frozenset]:
    return list(C.classes)


def sections_from_cosets(C: CosetSpace, groups: Sequence[Iterable[int]]) -> list[frozenset]:
    """Unions of cosets given by class-index groups; each group must have distinct targets."""
    out = []
    for grp in groups:
        grp = tuple(grp)
        if len({C.tau[c] for c in grp}) != len(grp):
            raise PreconditionError("two cosets over the same target", grp)
        out.append(frozenset().union(*(C.classes[c] for c in grp)))
    return out
