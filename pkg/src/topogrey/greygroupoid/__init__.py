"""Grey norms on finite groupoids, their synthesis from filtrations, and the
metric canonical structure."""

from .norms import (
    check_left_invariant,
    check_norm,
    check_strictly_unital,
    closure_oracle,
    crisp,
    factorizations,
    grey_closure,
    grey_conv,
    grey_inv,
    grey_max,
    grey_min,
    grey_sum,
    metric_to_norm,
    norm_domain,
    norm_from_json,
    norm_metric_bijection,
    norm_to_json,
    norm_to_metric,
    on,
    unit_zero_set,
    units_norm,
    zero_set,
)
from .filtration import (
    BKCertificate,
    Filtration,
    birkhoff_kakutani,
    chaining_bound_check,
    check_filtration,
    NormSynthesis,
    level_norm,
    synthesize_filtration,
    synthesize_norm,
)
from .metric import (
    CosetMetricSpace,
    MetricStructureFamily,
    MetricYonedaReport,
    SandwichReport,
    check_small,
    close_under_sum,
    coset_metric_space,
    count_eps_homs,
    enumerate_metric_homs,
    enumerate_metric_isos,
    metric_canonical_structure,
    metric_coherent_families,
    metric_eta,
    metric_phi,
    metric_yoneda_check,
    right_mult_grey_relation,
    separation_failures,
    smallness_radius,
)
