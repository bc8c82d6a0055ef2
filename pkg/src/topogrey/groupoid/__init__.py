"""Finite groupoids, coset spaces, structure families and the discrete Yoneda representation."""

from .core import (
    FinGroupoid,
    action_groupoid,
    cyclic_group,
    disjoint_union,
    generated_subgroupoid,
    group_groupoid,
    induced_subgroupoid,
    restrict,
    is_subgroupoid,
    orbits,
    pair_groupoid,
    relabel,
    validate_groupoid,
)
from .cosets import CosetSpace, check_section, coset_space, projection, right_mult_map
from .functors import FinFunctor, FunctorAnalysis, check_functor, functor_analysis, identity_functor
from .structures import (
    DiscreteStructureFamily,
    Uniformization,
    add_constants,
    brute_force_homs,
    check_constants_preserve_isos,
    encoding_extra,
    enumerate_homs,
    enumerate_isos,
    iso_groupoid,
    uniformize,
    verify_uniformization,
)
from .yoneda import (
    CanonicalStructure,
    EtaReport,
    canonical_structure,
    coherent_families,
    eta,
    verify_eta_iso,
    yoneda_phi,
    yoneda_psi,
)
