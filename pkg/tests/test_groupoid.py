import itertools
import random

import pytest

from topogrey import generators as gen
from topogrey.errors import PreconditionError
from topogrey.groupoid import (
    DiscreteStructureFamily,
    FinFunctor,
    FinGroupoid,
    action_groupoid,
    add_constants,
    brute_force_homs,
    canonical_structure,
    check_constants_preserve_isos,
    check_functor,
    coherent_families,
    coset_space,
    cyclic_group,
    disjoint_union,
    encoding_extra,
    enumerate_homs,
    enumerate_isos,
    eta,
    functor_analysis,
    generated_subgroupoid,
    identity_functor,
    is_subgroupoid,
    orbits,
    pair_groupoid,
    projection,
    right_mult_map,
    uniformize,
    validate_groupoid,
    verify_eta_iso,
    verify_uniformization,
    yoneda_phi,
)
from topogrey.groupoid.core import group_groupoid
from topogrey.groupoid.structures import SINGLE_SORT
from topogrey.groupoid.yoneda import check_coherent


def unit_families(G):
    """Per-object unit subgroupoids with every coset as a section."""
    Us = [frozenset([x]) for x in G.objects]
    Ss = [[frozenset([x])] + [frozenset([g]) for g in G.morphisms if G.src[g] == x and g != x] for x in G.objects]
    return Us, Ss


def all_coset_sections(G, U):
    C = coset_space(G, U)
    return [frozenset(U)] + [c for c in C.classes if c != frozenset(U)]


def pure_sets(sizes):
    base = tuple(sizes)
    return DiscreteStructureFamily(base, ("s",), {x: {"s": tuple(range(n))} for x, n in sizes.items()})


# A loop with two-sided identity and inverses that is not a group: associativity is the only failing axiom.
LOOP5 = [
    [0, 1, 2, 3, 4],
    [1, 0, 3, 4, 2],
    [2, 4, 0, 1, 3],
    [3, 2, 4, 0, 1],
    [4, 3, 1, 2, 0],
]


# -- validation and orbits -------------------------------------------------------------------


def test_z2_and_pair2_are_valid_with_one_orbit():
    for G in (cyclic_group(2), pair_groupoid(2)):
        assert validate_groupoid(G)
        assert len(orbits(G)) == 1
    assert len(pair_groupoid(2)) == 4


def test_planted_associativity_failure_is_reported_with_a_triple():
    G = FinGroupoid([str(i) for i in range(5)], [0] * 5, [0] * 5, LOOP5, list(range(5)), validate=False)
    v = validate_groupoid(G)
    assert not v and v.reason == "associativity" and len(v.witness) == 3
    g, h, k = (int(n) for n in v.witness)
    assert LOOP5[LOOP5[g][h]][k] != LOOP5[g][LOOP5[h][k]]


def test_disjoint_union_orbits():
    G = disjoint_union(pair_groupoid(2), cyclic_group(3), pair_groupoid(1))
    assert validate_groupoid(G)
    assert sorted(len(o) for o in orbits(G)) == [1, 1, 2]


def test_json_round_trip():
    G = pair_groupoid(2, gen.SMALL_GROUPS["Z2"])
    assert FinGroupoid.from_json(G.to_json()) == G


# -- generated subgroupoids -----------------------------------------------------------------


def test_generated_examples():
    G = pair_groupoid(3)
    assert generated_subgroupoid(G, G.objects) == frozenset(G.objects)
    Z4 = cyclic_group(4)
    assert generated_subgroupoid(Z4, [Z4.id_of("1")]) == frozenset(Z4.morphisms)
    assert generated_subgroupoid(G, []) == frozenset()


@pytest.mark.parametrize("seed", range(15))
def test_generated_is_least_subgroupoid(seed):
    rng = random.Random(seed)
    G = gen.random_groupoid(rng)
    A = frozenset(rng.sample(list(G.morphisms), rng.randint(1, 3)))
    H = generated_subgroupoid(G, A)
    assert A <= H and is_subgroupoid(G, H)
    # oracle: all products of words over A ∪ A⁻¹ up to length |G|
    letters = A | G.inverse_set(A)
    words = set(letters)
    for _ in range(len(G)):
        words |= G.product(words, letters)
    assert H == words


# -- action groupoids ----------------------------------------------------------------------------


def test_trivial_action_on_a_point_is_the_group():
    Z3 = cyclic_group(3)
    A = action_groupoid(Z3, ["p"], {"p": 0}, {(g, "p"): "p" for g in Z3.morphisms})
    assert len(A) == 3 and len(A.objects) == 1
    assert [[A.mul(g, h) for h in A.morphisms] for g in A.morphisms] == [list(r) for r in Z3.table]


def test_swap_action_has_one_orbit():
    Z2 = cyclic_group(2)
    act = {(g, a): a ^ g for g in Z2.morphisms for a in (0, 1)}
    A = action_groupoid(Z2, [0, 1], {0: 0, 1: 0}, act)
    assert len(A) == 4 and len(orbits(A)) == 1
    assert validate_groupoid(A)


def test_identity_groupoid_action_is_discrete():
    T = cyclic_group(1)
    pts = ["p", "q", "r"]
    A = action_groupoid(T, pts, {a: 0 for a in pts}, {(0, a): a for a in pts})
    assert len(A) == 3 and len(orbits(A)) == 3


def test_broken_action_is_rejected():
    Z2 = cyclic_group(2)
    with pytest.raises(PreconditionError):
        action_groupoid(Z2, [0, 1], {0: 0, 1: 0}, {(0, 0): 1, (0, 1): 0, (1, 0): 1, (1, 1): 0})


# -- cosets and right multiplication -------------------------------------------------------


def test_coset_examples():
    Z4 = cyclic_group(4)
    C = coset_space(Z4, {0, 2})
    assert sorted(map(sorted, C.classes)) == [[0, 2], [1, 3]]
    assert len(coset_space(Z4, Z4.morphisms).classes) == 1
    G = pair_groupoid(2)
    CU = coset_space(G, G.objects)
    assert all(len(c) == 1 for c in CU.classes) and len(CU.classes) == len(G)


def test_invalid_subgroupoid_is_rejected():
    with pytest.raises(PreconditionError):
        coset_space(cyclic_group(4), {0, 1})


def test_projection_is_right_multiplication_by_v():
    Z4 = cyclic_group(4)
    CU, CV = coset_space(Z4, {0}), coset_space(Z4, {0, 2})
    pi = projection(Z4, CU, CV)
    assert pi == right_mult_map(Z4, CU, CV, {0, 2})
    for c, members in enumerate(CU.classes):
        (g,) = members
        assert g in CV.classes[pi[c]]


def test_right_translation_on_units():
    G = cyclic_group(3)
    C = coset_space(G, G.objects)
    for g in G.morphisms:
        f = right_mult_map(G, C, C, {g})
        for c, members in enumerate(C.classes):
            (h,) = members
            assert C.classes[f[c]] == {G.mul(h, g)}


def test_right_mult_precondition_witness():
    Z4 = cyclic_group(4)
    with pytest.raises(PreconditionError) as exc:
        right_mult_map(Z4, {0, 2}, {0}, {1})
    assert exc.value.witness == "2"


# -- canonical structure and Yoneda -------------------------------------------------------------


def test_group_fibers_are_the_right_regular_representation():
    Z3 = cyclic_group(3)
    Us, Ss = [frozenset([0])], [[frozenset([0]), frozenset([1]), frozenset([2])]]
    CS = canonical_structure(Z3, Us, Ss)
    C = CS.cosets[0]
    for k, S in enumerate(Ss[0]):
        (g,) = S
        table = CS.maps[(0, 0, k)]
        for c, members in enumerate(C.classes):
            (h,) = members
            assert C.classes[table[c]] == {Z3.mul(h, g)}


def test_pair_groupoid_fibers_collect_hom_sets():
    G = pair_groupoid(3)
    CS = canonical_structure(G, *unit_families(G))
    for x in G.objects:
        for i, y in enumerate(G.objects):
            fiber = CS.family.fibers[x][f"U{i}"]
            assert [min(CS.cosets[i].classes[c]) for c in fiber] == list(G.hom(y, x))


def test_section_family_must_contain_u():
    Z2 = cyclic_group(2)
    with pytest.raises(PreconditionError, match="contain U"):
        canonical_structure(Z2, [frozenset([0])], [[frozenset([1])]])


def test_phi_of_eta_is_the_coset_family():
    Z4 = cyclic_group(4)
    Us = [frozenset([0]), frozenset([0, 2])]
    Ss = [[frozenset([g]) for g in range(4)], all_coset_sections(Z4, Us[1])]
    CS = canonical_structure(Z4, Us, Ss)
    for g in Z4.morphisms:
        assert yoneda_phi(CS, 0, eta(CS, g)) == {i: CS.cosets[i].class_of[g] for i in range(2)}


def test_incoherent_family_is_rejected():
    Z4 = cyclic_group(4)
    Us = [frozenset([0]), frozenset([0, 2])]
    Ss = [[frozenset([g]) for g in range(4)], all_coset_sections(Z4, Us[1])]
    CS = canonical_structure(Z4, Us, Ss)
    a = {0: CS.cosets[0].class_of[1], 1: CS.cosets[1].class_of[0]}
    v = check_coherent(CS, 0, 0, a)
    assert not v and v.witness == ("U0", "U1")
    assert len(coherent_families(CS, 0, 0)) == 4


def test_z2_has_two_endomorphisms():
    Z2 = cyclic_group(2)
    rep = verify_eta_iso(Z2, *unit_families(Z2))
    assert rep.ok
    assert rep.hom_counts[("0", "0")] == rep.iso_counts[("0", "0")] == 2


@pytest.mark.parametrize("name", sorted(gen.SMALL_GROUPS))
def test_small_groups_are_recovered(name):
    G = group_groupoid(gen.SMALL_GROUPS[name])
    rep = verify_eta_iso(G, *unit_families(G))
    assert rep.ok, rep.failures
    assert rep.iso_counts[("0", "0")] == len(G)


def test_pair3_hom_sets_are_singletons():
    G = pair_groupoid(3)
    rep = verify_eta_iso(G, *unit_families(G))
    assert rep.ok
    assert set(rep.groupoid_counts.values()) == set(rep.iso_counts.values()) == {1}
    assert len(rep.iso_counts) == 9


def test_discrete_groupoid_has_discrete_isos():
    G = disjoint_union(*(cyclic_group(1) for _ in range(3)))
    rep = verify_eta_iso(G, *unit_families(G))
    assert rep.ok
    for (x, y), n in rep.iso_counts.items():
        assert n == (1 if x == y else 0)


@pytest.mark.parametrize("seed", range(10))
def test_random_yoneda(seed):
    rng = random.Random(seed)
    G = gen.random_groupoid(rng)
    Us, Ss = gen.random_subgroupoid_family(rng, G)
    rep = verify_eta_iso(G, Us, Ss)
    assert rep.ok, rep.failures
    assert rep.limit_counts == rep.hom_counts


# -- homomorphism enumeration ----------------------------------------------------------------


def test_pure_two_element_sets():
    M = pure_sets({"x": 2, "y": 2})
    assert len(enumerate_homs(M, "x", "y")) == 4
    assert len(enumerate_isos(M, "x", "y")) == 2


def test_unary_relation_constrains_homs():
    M = DiscreteStructureFamily(
        ("x", "y"), ("s",), {"x": {"s": (0, 1)}, "y": {"s": (0, 1)}},
        {"P": ("s",)}, {"P": {"x": frozenset({(0,)}), "y": frozenset({(0,), (1,)})}},
    )
    key = lambda hs: sorted(sorted(h["s"].items()) for h in hs)  # noqa: E731
    assert key(enumerate_homs(M, "x", "y")) == key(brute_force_homs(M, "x", "y"))
    assert len(enumerate_homs(M, "x", "y")) == 4
    # the other way round 1 must land in {0}
    assert len(enumerate_homs(M, "y", "x")) == 1


def test_empty_fiber_has_only_the_empty_map():
    M = pure_sets({"x": 0, "y": 2})
    assert len(enumerate_homs(M, "x", "y")) == 1
    assert enumerate_isos(M, "x", "y") == []


@pytest.mark.parametrize("seed", range(20))
def test_hom_enumeration_matches_brute_force(seed):
    M = gen.random_structure_family(random.Random(seed), max_points=3)
    key = lambda hs: sorted(sorted(h["s"].items()) for h in hs)  # noqa: E731
    for x, y in itertools.product(M.base, repeat=2):
        assert key(enumerate_homs(M, x, y)) == key(brute_force_homs(M, x, y))
        assert key(enumerate_isos(M, x, y)) == key(brute_force_homs(M, x, y, iso=True))


# -- constants and uniformization -------------------------------------------------------------


def test_constants_on_empty_fibers():
    M2 = add_constants(pure_sets({"x": 0, "y": 0}), 2)
    assert len(M2.fibers["x"][SINGLE_SORT]) == 2
    assert len(enumerate_isos(M2, "x", "x")) == 1


def test_constants_on_two_sorted_fibers():
    M = DiscreteStructureFamily(("x",), ("p", "q"), {"x": {"p": (0,), "q": (0, 1)}})
    M2 = add_constants(M, 1)
    elems = set(M2.fibers["x"][SINGLE_SORT])
    assert len(elems) == 4
    P = {a for (a,) in M2.relations["sort:p"]["x"]}
    Q = {a for (a,) in M2.relations["sort:q"]["x"]}
    C = {a for (a,) in M2.relations["C0"]["x"]}
    assert P | Q | C == elems and not (P & Q) and not (P & C) and not (Q & C)


@pytest.mark.parametrize("seed", range(15))
def test_constants_preserve_iso_counts(seed):
    M = gen.random_structure_family(random.Random(seed))
    M2 = add_constants(M, 2)
    counts = check_constants_preserve_isos(M, M2)
    for (x, y), n in counts.items():
        assert len(enumerate_isos(M2, x, y)) == n


def test_single_fiber_uniformization():
    M = pure_sets({"x": 3})
    U = uniformize(M)
    rep = verify_uniformization(U)
    assert rep.full and rep.faithful and U.N == 4
    assert rep.iso_counts


def test_isomorphic_fibers_share_an_image():
    M = DiscreteStructureFamily(
        ("x", "y"), ("s",), {"x": {"s": (0, 1)}, "y": {"s": ("a", "b")}},
        {"P": ("s",)}, {"P": {"x": frozenset({(1,)}), "y": frozenset({("a",)})}},
    )
    U = uniformize(M)
    rep = verify_uniformization(U)
    assert rep.full and rep.faithful and rep.orbit_reduction_injective
    a, b = U.object_map["x"], U.object_map["y"]
    assert enumerate_isos(U.image_family, a, b)
    assert len(orbits(U.target)) == 1


def test_injective_on_objects_mode_decodes():
    M = pure_sets({"x": 3, "y": 3, "z": 3})
    U = uniformize(M, "injective_on_objects", k_extra=2)
    assert U.N == 5
    rep = verify_uniformization(U)
    assert rep.full and rep.faithful and rep.injective_on_objects and rep.decode_round_trip
    assert len(set(U.object_map.values())) == 3
    for x in M.base:
        assert U.decode(U.object_map[x]) == x


def test_universe_too_small_for_encoding():
    M = pure_sets({f"x{i}": 0 for i in range(3)})
    with pytest.raises(PreconditionError):
        uniformize(M, "injective_on_objects", k_extra=1)


# -- functors -------------------------------------------------------------------------------------


def test_identity_functor_is_its_own_inverse():
    G = pair_groupoid(2, gen.SMALL_GROUPS["Z2"])
    an = functor_analysis(identity_functor(G))
    assert an.equivalence
    assert an.inverse.mor == tuple(G.morphisms)


def test_one_object_inclusion_into_pair_groupoid():
    P = pair_groupoid(2)
    F = FinFunctor(cyclic_group(1), P, (0,))
    assert check_functor(F)
    an = functor_analysis(F)
    assert an.full and an.faithful and an.essentially_surjective
    assert an.inverse is not None and all(g == 0 for g in an.inverse.mor)


def test_collapse_is_full_not_faithful():
    F = FinFunctor(cyclic_group(2), cyclic_group(1), (0, 0))
    an = functor_analysis(F)
    assert an.full and not an.faithful and an.inverse is None


def test_invalid_functor_is_rejected():
    Z2, Z3 = cyclic_group(2), cyclic_group(3)
    with pytest.raises(PreconditionError):
        functor_analysis(FinFunctor(Z2, Z3, (0, 1)))


def test_encoding_width_grows_with_the_base():
    assert encoding_extra(pure_sets({"x": 3, "y": 3, "z": 3})) == 1
    M = pure_sets({f"x{i}": 0 for i in range(3)})
    assert encoding_extra(M) == 3
    U = uniformize(M, "injective_on_objects")
    assert U.N == 3 and verify_uniformization(U).injective_on_objects
