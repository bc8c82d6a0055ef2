import random
from fractions import Fraction as F

import pytest

from topogrey import generators as gen
from topogrey.errors import PreconditionError
from topogrey.greycore import ONE, ZERO
from topogrey.greygroupoid import (
    Filtration,
    birkhoff_kakutani,
    chaining_bound_check,
    check_filtration,
    check_norm,
    close_under_sum,
    closure_oracle,
    coset_metric_space,
    crisp,
    grey_closure,
    grey_conv,
    grey_inv,
    level_norm,
    metric_yoneda_check,
    norm_metric_bijection,
    norm_to_metric,
    on,
    right_mult_grey_relation,
    separation_failures,
    synthesize_filtration,
    synthesize_norm,
    units_norm,
)
from topogrey.groupoid import coset_space, cyclic_group, disjoint_union, pair_groupoid, right_mult_map, verify_eta_iso

Z2 = cyclic_group(2)
Z4 = cyclic_group(4)
W4 = on(Z4, [0, 1, F(1, 2), 1])


def random_unital(rng, G):
    """A strictly unital grey set: non-units may be below 1 only between zero units."""
    zero = {x for x in G.objects if rng.random() < 0.7} or {G.objects[0]}
    vals = []
    for g in G.morphisms:
        if G.is_unit(g):
            vals.append(ZERO if g in zero else ONE)
        elif G.src[g] in zero and G.tgt[g] in zero:
            vals.append(gen.random_fraction(rng, 6))
        else:
            vals.append(ONE)
    return on(G, vals)


# -- convolution ----------------------------------------------------------------------------------


def test_units_are_a_two_sided_identity():
    G = pair_groupoid(2, gen.SMALL_GROUPS["Z2"])
    A = random_unital(random.Random(1), G)
    E = units_norm(G)
    assert grey_conv(G, A, E) == A == grey_conv(G, E, A)


def test_z2_convolution_hand_value():
    A = on(Z2, [0, F(1, 4)])
    B = on(Z2, [F(1, 4), F(1, 2)])
    assert grey_conv(Z2, A, B) == on(Z2, [F(1, 4), F(1, 2)])


@pytest.mark.parametrize("seed", range(20))
def test_convolution_laws(seed):
    rng = random.Random(seed)
    G = gen.random_groupoid(rng, max_morphisms=10)
    A, B, C = (gen.random_greyset(rng, tuple(G.morphisms), max_den=4) for _ in range(3))
    assert grey_conv(G, grey_conv(G, A, B), C) == grey_conv(G, A, grey_conv(G, B, C))
    assert grey_inv(G, grey_conv(G, A, B)) == grey_conv(G, grey_inv(G, B), grey_inv(G, A))


# -- closure ------------------------------------------------------------------------------------------


def test_closure_of_a_norm_is_itself():
    assert grey_closure(Z4, W4) == W4


def test_z2_closure_keeps_the_generator():
    A = on(Z2, [0, F(3, 10)])
    assert grey_closure(Z2, A) == A


def test_z4_closure_takes_the_short_path():
    A = on(Z4, [0, F(3, 10), 1, 1])
    N = grey_closure(Z4, A)
    assert N(2) == F(3, 5)
    assert N(3) == F(3, 10)
    assert check_norm(Z4, N)


def test_closure_needs_strict_units():
    with pytest.raises(PreconditionError):
        grey_closure(Z2, on(Z2, [F(1, 2), 1]))


@pytest.mark.parametrize("seed", range(30))
def test_closure_matches_min_plus_oracle(seed):
    rng = random.Random(seed)
    G = gen.random_groupoid(rng)
    A = random_unital(rng, G)
    N = grey_closure(G, A)
    assert N == closure_oracle(G, A)
    assert check_norm(G, N)
    assert A.below(N)


# -- norms and pseudometrics ------------------------------------------------------------------------


def test_crisp_norm_gives_discrete_metric_on_cosets():
    H = frozenset([0, 2])
    d = norm_to_metric(Z4, crisp(Z4, H))
    C = coset_space(Z4, H)
    for g in Z4.morphisms:
        for h in Z4.morphisms:
            assert d(g, h) == (ZERO if C.class_of[g] == C.class_of[h] else ONE)


def test_metric_hand_value():
    assert norm_to_metric(Z4, W4)(1, 3) == F(1, 2)


@pytest.mark.parametrize("seed", range(25))
def test_norm_metric_round_trip(seed):
    rng = random.Random(seed)
    G = gen.random_groupoid(rng)
    U = gen.random_norm(rng, G)
    d, back = norm_metric_bijection(G, U)
    assert back == U


# -- filtrations and synthesis -------------------------------------------------------------------


def test_discrete_groupoid_filtration_is_constant():
    G = disjoint_union(cyclic_group(1), cyclic_group(1))
    U = crisp(G, G.objects)
    F_ = synthesize_filtration(G, U, G.objects, 3)
    assert all(L == frozenset(G.objects) for L in F_.levels)


def test_z4_greedy_trace():
    U = on(Z4, [0, 1, F(1, 8), 1])
    F_ = synthesize_filtration(Z4, U, [0], 2)
    assert F_.levels == (frozenset({0, 2}), frozenset({0, 2}), frozenset({0}))


def test_depth_zero_is_a_single_level():
    assert len(synthesize_filtration(Z4, on(Z4, [0, 1, F(1, 8), 1]), [0], 0)) == 1


def test_unit_outside_target_zero_set_is_rejected():
    with pytest.raises(PreconditionError):
        synthesize_filtration(Z4, on(Z4, [F(1, 2), 1, 1, 1]), [0], 1)


def test_bk_on_the_z4_filtration():
    Fz = Filtration((frozenset(range(4)), frozenset({0, 2})), frozenset({0}))
    assert check_filtration(Z4, Fz)
    assert level_norm(Z4, Fz) == W4
    W, cert = birkhoff_kakutani(Z4, Fz)
    assert W == W4 and cert.ok
    assert W(2) >= F(1, 4)


def test_constant_unit_filtration_gives_crisp_units():
    G = pair_groupoid(2)
    Fc = Filtration((frozenset(G.objects),) * 3, frozenset(G.objects))
    W, cert = birkhoff_kakutani(G, Fc)
    assert W == crisp(G, G.objects) and cert.ok


def test_bad_filtration_is_rejected():
    bad = Filtration((frozenset({0, 2}), frozenset({0, 1, 3})), frozenset({0}))
    assert not check_filtration(Z4, bad)
    with pytest.raises(PreconditionError):
        birkhoff_kakutani(Z4, bad)


def chain_oracle(G, Vp, length):
    """Exhaustive factorizations by recursion over the composition table."""
    def rec(prod, total, k):
        if Vp(prod) > 2 * total:
            return False
        if k == length:
            return True
        return all(rec(c, total + Vp(h), k + 1) for h in G.morphisms if (c := G.table[prod][h]) is not None)

    return all(rec(g, Vp(g), 1) for g in G.morphisms)


@pytest.mark.parametrize("seed", range(20))
def test_synthesized_norms_carry_certificates(seed):
    rng = random.Random(seed)
    G = gen.random_groupoid(rng)
    U = gen.random_norm(rng, G)
    units = [x for x in G.objects if U(x) == 0]
    syn = synthesize_norm(G, U, units, rng.randint(0, 3))
    assert syn.ok, syn.certificate.witnesses
    assert all(syn.norm(g) >= U(g) for g in G.morphisms)
    Vp = level_norm(G, syn.filtration)
    ok, _, _ = chaining_bound_check(G, Vp, 4)
    assert ok and chain_oracle(G, Vp, 4)


# -- coset metric spaces ------------------------------------------------------------------------


def test_crisp_coset_metric_matches_discrete_cosets():
    H = frozenset([0, 2])
    C = coset_metric_space(Z4, crisp(Z4, H))
    D = coset_space(Z4, H)
    assert sorted(map(sorted, C.classes)) == sorted(map(sorted, D.classes))
    assert {C.d(a, b) for a in range(2) for b in range(2) if a != b} == {ONE}


def test_z4_norm_coset_metric():
    C = coset_metric_space(Z4, W4)
    assert len(C.classes) == 4
    c = C.class_of
    assert C.d(c[0], c[2]) == F(1, 2) and C.d(c[0], c[1]) == 1 and C.d(c[1], c[3]) == F(1, 2)


def test_zero_norm_gives_a_point():
    assert len(coset_metric_space(Z4, on(Z4, [0] * 4)).classes) == 1


# -- sandwich ---------------------------------------------------------------------------------------


def test_crisp_sandwich_is_the_right_multiplication_graph():
    U, V = crisp(Z4, {0}), crisp(Z4, {0, 2})
    rep = right_mult_grey_relation(Z4, U, V, {0, 2}, ONE)
    assert rep.ok
    CU, CV = coset_space(Z4, {0}), coset_space(Z4, {0, 2})
    f = right_mult_map(Z4, CU, CV, {0, 2})
    MU, MV = coset_metric_space(Z4, U), coset_metric_space(Z4, V)
    for (a, b), val in rep.relation.items():
        gu = CU.class_of[min(MU.classes[a])]
        hv = CV.class_of[min(MV.classes[b])]
        assert val == (ZERO if f[gu] == hv else ONE)


def test_unit_section_sandwich_is_the_metric():
    rep = right_mult_grey_relation(Z4, W4, W4, {0}, F(1, 4))
    assert rep.ok
    C = coset_metric_space(Z4, W4)
    for (a, b), val in rep.relation.items():
        assert val == C.d(a, b)


def test_non_small_section_is_rejected():
    with pytest.raises(PreconditionError) as exc:
        right_mult_grey_relation(Z4, W4, W4, {0, 1}, F(1, 2))
    assert len(exc.value.witness) == 2


@pytest.mark.parametrize("seed", range(15))
def test_random_sandwiches_hold_exactly(seed):
    rng = random.Random(seed)
    inst = gen.random_sandwich_instance(rng, gen.random_groupoid(rng))
    rep = right_mult_grey_relation(inst.G, inst.U, inst.V, inst.S, inst.r)
    assert rep.ok, rep.witnesses


# -- metric Yoneda ------------------------------------------------------------------------------------


def test_crisp_metric_yoneda_matches_discrete():
    Z3 = cyclic_group(3)
    rep = metric_yoneda_check(Z3, [units_norm(Z3)])
    assert rep.ok
    disc = verify_eta_iso(Z3, [frozenset([0])], [[frozenset([g]) for g in Z3.morphisms]])
    assert rep.counts[("0", "0")]["isos"] == disc.iso_counts[("0", "0")] == 3


def test_z4_metric_yoneda():
    norms = close_under_sum([units_norm(Z4), W4])
    rep = metric_yoneda_check(Z4, norms)
    assert rep.ok, rep.failures
    assert rep.counts[("0", "0")]["isos"] == 4


def test_unclosed_family_is_rejected():
    with pytest.raises(PreconditionError, match="closed"):
        metric_yoneda_check(Z4, [units_norm(Z4), W4, on(Z4, [0, F(1, 4), F(1, 2), F(1, 4)])])


def test_separation_failure_is_reported():
    U = crisp(Z4, {0, 2})
    assert separation_failures(Z4, [U]) == [(0, 2), (1, 3)]
    rep = metric_yoneda_check(Z4, [U], sections=[[0, 2], [1, 3]])
    assert ("0", "2") in rep.separation_failures
    assert rep.counts == {}
