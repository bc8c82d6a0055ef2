"""Grey subsets of a finite groupoid: convolution, inversion, norms and their closure.

A grey subset is a :class:`GreySet` whose carrier is the morphism indices
``0..m-1``.  A *norm* (strict grey subgroupoid) is symmetric, strictly
unital and submultiplicative.
"""

from __future__ import annotations

import heapq
from typing import Iterable, Mapping

from ..errors import PreconditionError, Verdict
from ..greycore import ONE, ZERO, GreyRelation, GreySet, fmt_rational, parse_rational, trunc_add
from ..groupoid.core import FinGroupoid


def on(G: FinGroupoid, values) -> GreySet:
    """Grey subset of ``G`` from a sequence or mapping indexed by morphism."""
    if isinstance(values, Mapping):
        return GreySet(tuple(G.morphisms), dict(values))
    return GreySet(tuple(G.morphisms), dict(enumerate(values)))


def crisp(G: FinGroupoid, members: Iterable[int]) -> GreySet:
    return GreySet.zero_indicator(tuple(G.morphisms), members)


def zero_set(A: GreySet) -> frozenset:
    return frozenset(g for g in A.carrier if A(g) == 0)


def unit_zero_set(G: FinGroupoid, A: GreySet) -> frozenset:
    """``G⁰ ∩ A_{=0}``."""
    return frozenset(x for x in G.objects if A(x) == 0)


def _check_carrier(G: FinGroupoid, *sets: GreySet) -> None:
    for A in sets:
        if A.carrier != tuple(G.morphisms):
            raise PreconditionError("grey set is not on the morphisms of this groupoid", len(A.carrier))


def grey_conv(G: FinGroupoid, A: GreySet, B: GreySet) -> GreySet:
    """``(A ⊙ B)(g) = min over g = h·k of A(h) +̇ B(k)``; empty min is 1."""
    _check_carrier(G, A, B)
    out = [ONE] * len(G)
    for h in G.morphisms:
        a = A(h)
        if a == ONE:
            continue
        row = G.table[h]
        for k in G.morphisms:
            c = row[k]
            if c is not None:
                v = trunc_add(a, B(k))
                if v < out[c]:
                    out[c] = v
    return on(G, out)


def grey_inv(G: FinGroupoid, A: GreySet) -> GreySet:
    _check_carrier(G, A)
    return on(G, [A(G.inv[g]) for g in G.morphisms])


def grey_min(A: GreySet, B: GreySet) -> GreySet:
    return GreySet(A.carrier, {g: min(A(g), B(g)) for g in A.carrier})


def grey_max(A: GreySet, B: GreySet) -> GreySet:
    return GreySet(A.carrier, {g: max(A(g), B(g)) for g in A.carrier})


def grey_sum(A: GreySet, B: GreySet) -> GreySet:
    """Pointwise ``A +̇ B``."""
    return GreySet(A.carrier, {g: trunc_add(A(g), B(g)) for g in A.carrier})


def check_strictly_unital(G: FinGroupoid, A: GreySet) -> Verdict:
    for x in G.objects:
        if A(x) not in (ZERO, ONE):
            return Verdict.reject("grey value on a unit", (G.names[x],))
    for g in G.morphisms:
        if A(g) < 1 and (A(G.src[g]) != 0 or A(G.tgt[g]) != 0):
            return Verdict.reject("value below 1 over a unit outside the zero set", (G.names[g],))
    return Verdict.accept()


def check_norm(G: FinGroupoid, U: GreySet) -> Verdict:
    """Strict grey subgroupoid axioms; witnesses are morphism names."""
    _check_carrier(G, U)
    v = check_strictly_unital(G, U)
    if not v:
        return v
    for g in G.morphisms:
        if U(G.inv[g]) != U(g):
            return Verdict.reject("not symmetric", (G.names[g],))
    for g in G.morphisms:
        ug = U(g)
        if ug == ONE:
            continue
        for h in G.morphisms:
            c = G.table[g][h]
            if c is not None and U(c) > trunc_add(ug, U(h)):
                return Verdict.reject("not submultiplicative", (G.names[g], G.names[h]))
    return Verdict.accept()


def grey_closure(G: FinGroupoid, A: GreySet) -> GreySet:
    """Least norm ``⟨A⟩`` below ``A`` in the grey order (pointwise largest values ≤ A).

    For each object ``x`` a Dijkstra search over ``σ⁻¹(x)``: a factorization
    ``g = g_0 ⋯ g_{k-1}`` is a path that starts at ``g_{k-1}`` and multiplies
    on the left, paying ``(A ⊔ A^⊖)(g_i)`` per step.
    """
    _check_carrier(G, A)
    check_strictly_unital(G, A).raise_if_failed()
    B = [min(A(g), A(G.inv[g])) for g in G.morphisms]
    by_source: dict = {}
    for b in G.morphisms:
        if B[b] < 1:
            by_source.setdefault(G.src[b], []).append(b)
    best = [ONE] * len(G)
    for x in G.objects:
        dist: dict = {}
        heap = []
        for g in G.morphisms:
            if G.src[g] == x and B[g] < 1:
                dist[g] = B[g]
                heap.append((B[g], g))
        heapq.heapify(heap)
        done = set()
        while heap:
            d, h = heapq.heappop(heap)
            if h in done:
                continue
            done.add(h)
            for b in by_source.get(G.tgt[h], ()):
                nd = d + B[b]
                if nd >= 1:
                    continue
                c = G.table[b][h]
                if nd < dist.get(c, ONE):
                    dist[c] = nd
                    heapq.heappush(heap, (nd, c))
        for g, d in dist.items():
            best[g] = min(best[g], d)
    return on(G, best)


def closure_oracle(G: FinGroupoid, A: GreySet, rounds: int | None = None) -> GreySet:
    """``⊔_{n ≤ N} (A ⊔ A^⊖)^{⊙n}`` by repeated convolution (reference)."""
    B = grey_min(A, grey_inv(G, A))
    rounds = len(G) if rounds is None else rounds
    acc, power = B, B
    for _ in range(rounds - 1):
        power = grey_conv(G, power, B)
        acc = grey_min(acc, power)
    return acc


# -- norms and left-invariant pseudometrics ---------------------------------------------------


def norm_domain(G: FinGroupoid, U: GreySet) -> tuple:
    """``σ⁻¹(U_{=0})`` in index order."""
    return G.with_source(unit_zero_set(G, U))


def norm_to_metric(G: FinGroupoid, U: GreySet) -> GreyRelation:
    """``d_U(g, h) = U(g⁻¹·h)`` on ``σ⁻¹(U_{=0})``; pairs over different targets get 1."""
    check_norm(G, U).raise_if_failed()
    dom = norm_domain(G, U)

    def d(g, h):
        if G.tgt[g] != G.tgt[h]:
            return ONE
        return U(G.mul(G.inv[g], h))

    return GreyRelation.from_function(dom, dom, d)


def check_left_invariant(G: FinGroupoid, d: GreyRelation) -> Verdict:
    dom = set(d.source)
    for g in d.source:
        for h in d.source:
            if G.tgt[g] != G.tgt[h]:
                continue
            for k in G.morphisms:
                if G.src[k] != G.tgt[g]:
                    continue
                kg, kh = G.mul(k, g), G.mul(k, h)
                if kg not in dom or kh not in dom:
                    return Verdict.reject("domain not closed under left multiplication", (G.names[k], G.names[g]))
                if d(kg, kh) != d(g, h):
                    return Verdict.reject("not left-invariant", (G.names[k], G.names[g], G.names[h]))
    return Verdict.accept()


def metric_to_norm(G: FinGroupoid, d: GreyRelation) -> GreySet:
    """``U_d(g) = d(τ(g), g)``; 1 off the domain of ``d``."""
    from ..greycore import pseudometric_check

    pseudometric_check(d).raise_if_failed()
    check_left_invariant(G, d).raise_if_failed()
    dom = set(d.source)
    vals = [d(G.tgt[g], g) if g in dom and G.tgt[g] in dom else ONE for g in G.morphisms]
    return on(G, vals)


def norm_metric_bijection(G: FinGroupoid, U: GreySet) -> tuple[GreyRelation, GreySet]:
    """``d_U`` together with the round-trip norm ``U_{d_U}`` (which must equal U)."""
    d = norm_to_metric(G, U)
    back = metric_to_norm(G, d)
    if back != U:
        raise AssertionError("norm -> metric -> norm is not the identity")
    return d, back


# -- serialization ------------------------------------------------------------------------------


def norm_to_json(G: FinGroupoid, U: GreySet, ref: str = "") -> dict:
    return {"groupoid": ref, "values": {str(G.names[g]): fmt_rational(U(g)) for g in G.morphisms}}


def norm_from_json(G: FinGroupoid, data: Mapping) -> GreySet:
    vals = data["values"]
    try:
        return on(G, {G.id_of(name): parse_rational(v) for name, v in vals.items()})
    except KeyError as exc:
        raise PreconditionError("norm names an unknown morphism", str(exc)) from None


def units_norm(G: FinGroupoid, units: Iterable[int] | None = None) -> GreySet:
    """Crisp norm that is 0 exactly on the given units."""
    units = frozenset(G.objects if units is None else units)
    return crisp(G, units)


def factorizations(G: FinGroupoid, length: int):
    """All composable sequences ``(g_0, ..., g_{n-1})`` with product ``g_0 ⋯ g_{n-1}``."""
    def rec(seq, prod):
        if len(seq) == length:
            yield tuple(seq), prod
            return
        for k in G.morphisms:
            c = G.table[prod][k]
            if c is not None:
                seq.append(k)
                yield from rec(seq, c)
                seq.pop()

    for g in G.morphisms:
        yield from rec([g], g)
