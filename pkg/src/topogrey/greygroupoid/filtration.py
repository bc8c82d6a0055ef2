"""Norm synthesis from a descending filtration (Birkhoff–Kakutani at finite scale)."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from ..errors import PreconditionError, Verdict
from ..greycore import ONE, ZERO, GreySet
from ..groupoid.core import FinGroupoid
from .norms import check_norm, factorizations, grey_closure, on


@dataclass(frozen=True)
class Filtration:
    """``levels[0] ⊇ levels[1] ⊇ ...``, all sharing the unit set ``units``.

    Beyond the last level the filtration continues with ``units`` alone,
    which always satisfies the triple-product condition.
    """

    levels: tuple
    units: frozenset

    def __len__(self) -> int:
        return len(self.levels)


def check_filtration(G: FinGroupoid, F: Filtration) -> Verdict:
    units = frozenset(F.units)
    if not units <= frozenset(G.objects):
        return Verdict.reject("unit set contains non-units", tuple(sorted(units - frozenset(G.objects))))
    levels = [frozenset(L) for L in F.levels] + [units]
    for n, L in enumerate(levels):
        if G.units_of(L) != units:
            return Verdict.reject("level has the wrong units", (n,))
        for g in sorted(L):
            if G.inv[g] not in L:
                return Verdict.reject("level not symmetric", (n, G.names[g]))
            if G.src[g] not in L or G.tgt[g] not in L:
                return Verdict.reject("level not unital", (n, G.names[g]))
        if n and not L <= levels[n - 1]:
            return Verdict.reject("levels not descending", (n,))
    for n in range(len(levels) - 1):
        top, nxt = levels[n], sorted(levels[n + 1])
        for a in nxt:
            for b in nxt:
                ab = G.table[a][b]
                if ab is None:
                    continue
                for c in nxt:
                    abc = G.table[ab][c]
                    if abc is not None and abc not in top:
                        return Verdict.reject(
                            "triple product escapes the previous level",
                            (n + 1, G.names[a], G.names[b], G.names[c]),
                        )
    return Verdict.accept()


def _symmetric_unital_core(G: FinGroupoid, S: set, units: frozenset) -> set:
    S = {g for g in S if G.inv[g] in S and G.src[g] in units and G.tgt[g] in units}
    return S | set(units)


def synthesize_filtration(G: FinGroupoid, U: GreySet, units: Iterable[int], depth: int) -> Filtration:
    """Greedy filtration below ``U`` with ``V_n ⊆ U_{<2^-(n+1)}``.

    ``V_0`` is every morphism of ``U_{<1/2}`` whose inverse also qualifies and
    whose endpoints are in ``units``.  ``V_{n+1}`` starts from
    ``V_n ∩ U_{<2^-(n+2)}`` and repeatedly drops the highest-indexed
    non-unit morphism (with its inverse) occurring in a triple whose product
    leaves ``V_n``.
    """
    units = frozenset(units)
    if not units <= frozenset(G.objects):
        raise PreconditionError("unit set contains non-units", sorted(units))
    bad = [x for x in sorted(units) if U(x) != 0]
    if bad:
        raise PreconditionError("unit outside the zero set of the target", G.names[bad[0]])
    if depth < 0:
        raise PreconditionError("negative depth", depth)
    V0 = _symmetric_unital_core(G, {g for g in G.morphisms if U(g) < Fraction(1, 2)}, units)
    levels = [frozenset(V0)]
    for n in range(depth):
        prev = levels[-1]
        thresh = Fraction(1, 2 ** (n + 2))
        S = _symmetric_unital_core(G, {g for g in prev if U(g) < thresh}, units)
        while True:
            culprit = _worst_violation(G, S, prev, units)
            if culprit is None:
                break
            S.discard(culprit)
            S.discard(G.inv[culprit])
        levels.append(frozenset(S))
    F = Filtration(tuple(levels), units)
    check_filtration(G, F).raise_if_failed(AssertionError)
    return F


def _worst_violation(G: FinGroupoid, S: set, prev: frozenset, units: frozenset) -> int | None:
    worst = None
    members = sorted(S)
    for a in members:
        for b in members:
            ab = G.table[a][b]
            if ab is None:
                continue
            for c in members:
                abc = G.table[ab][c]
                if abc is not None and abc not in prev:
                    cand = max(g for g in (a, b, c) if g not in units)
                    if worst is None or cand > worst:
                        worst = cand
    return worst


def level_norm(G: FinGroupoid, F: Filtration) -> GreySet:
    """``V'(g) = min{2^-n : g ∈ V_n}``, 0 on the common units, 1 outside ``V_0``."""
    vals = []
    for g in G.morphisms:
        if g in F.units:
            vals.append(ZERO)
            continue
        v = ONE
        for n, L in enumerate(F.levels):
            if g in L:
                v = Fraction(1, 2**n)
        vals.append(v)
    return on(G, vals)


@dataclass
class BKCertificate:
    norm_ok: Verdict
    units_ok: bool
    half_bound_ok: bool
    dominated_ok: bool | None
    chaining_ok: bool
    chaining_checked: int
    witnesses: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return bool(self.norm_ok) and self.units_ok and self.half_bound_ok and self.chaining_ok and self.dominated_ok is not False


def chaining_bound_check(G: FinGroupoid, Vp: GreySet, max_length: int = 4) -> tuple[bool, int, tuple | None]:
    """``V'(g_0 ⋯ g_{m-1}) ≤ 2 Σ V'(g_i)`` over every factorization of length ≤ max_length."""
    checked = 0
    for m in range(1, max_length + 1):
        for seq, prod in factorizations(G, m):
            checked += 1
            if Vp(prod) > 2 * sum(Vp(g) for g in seq):
                return False, checked, tuple(G.names[g] for g in seq)
    return True, checked, None


def birkhoff_kakutani(
    G: FinGroupoid,
    F: Filtration,
    target: GreySet | None = None,
    chain_length: int = 4,
) -> tuple[GreySet, BKCertificate]:
    """``W = ⟨V'⟩`` with certificates: norm axioms, unit set, ``W ≥ V'/2``,
    ``W ⊑ target`` (when given), and the chaining bound."""
    check_filtration(G, F).raise_if_failed()
    Vp = level_norm(G, F)
    W = grey_closure(G, Vp)
    wit: dict = {}
    norm_ok = check_norm(G, W)
    units_ok = frozenset(x for x in G.objects if W(x) == 0) == frozenset(F.units)
    half = [g for g in G.morphisms if W(g) < Vp(g) / 2]
    if half:
        wit["half_bound"] = G.names[half[0]]
    dominated = None
    if target is not None:
        worse = [g for g in G.morphisms if W(g) < target(g)]
        dominated = not worse
        if worse:
            wit["dominated"] = G.names[worse[0]]
    chain_ok, checked, chain_wit = chaining_bound_check(G, Vp, chain_length)
    if chain_wit:
        wit["chaining"] = chain_wit
    return W, BKCertificate(norm_ok, units_ok, not half, dominated, chain_ok, checked, wit)


@dataclass
class NormSynthesis:
    """``W = W' +̇ W'`` where ``W'`` is synthesized below ``U/2``."""

    norm: GreySet
    inner: GreySet
    half_target: GreySet
    filtration: Filtration
    certificate: BKCertificate
    dominated: bool
    units_ok: bool

    @property
    def ok(self) -> bool:
        return self.certificate.ok and self.dominated and self.units_ok


def synthesize_norm(
    G: FinGroupoid, U: GreySet, units: Iterable[int], depth: int, chain_length: int = 4
) -> NormSynthesis:
    """A norm ``W ⊑ U`` whose zero units are exactly ``units``.

    The filtration is built against ``U/2`` (bounded by 1/2, where the level
    norm bound forces domination), and the resulting norm is doubled.
    """
    units = frozenset(units)
    half = U.map_values(lambda v: v / 2)
    F = synthesize_filtration(G, half, units, depth)
    inner, cert = birkhoff_kakutani(G, F, target=half, chain_length=chain_length)
    W = on(G, [min(ONE, 2 * inner(g)) for g in G.morphisms])
    dominated = all(W(g) >= U(g) for g in G.morphisms)
    units_ok = frozenset(x for x in G.objects if W(x) == 0) == units
    return NormSynthesis(W, inner, half, F, cert, dominated, units_ok)
