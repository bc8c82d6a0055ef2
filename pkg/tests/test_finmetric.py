import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import metric_spaces
from topogrey.errors import PreconditionError
from topogrey.finmetric import (
    FinMetricSpace,
    brute_force_isometries,
    check_partial_isometry,
    find_isometry,
    hausdorff_distance,
    iter_isometries,
    sum_product,
    validate_metric,
)


def space(points, pairs):
    """Metric space from a dict of unordered pairs."""
    def d(a, b):
        if a == b:
            return F(0)
        return pairs.get((a, b), pairs.get((b, a)))

    return FinMetricSpace.from_function(points, d)


def test_triangle_violation_is_rejected():
    pts = ("a", "b", "c")
    dist = [[0, 1, F(1, 4)], [1, 0, F(1, 4)], [F(1, 4), F(1, 4), 0]]
    assert not validate_metric(pts, dist)
    with pytest.raises(PreconditionError):
        FinMetricSpace(pts, dist)


def test_zero_distance_between_distinct_points_is_rejected():
    assert not validate_metric(("a", "b"), [[0, 0], [0, 0]])


def test_product_with_a_point_is_isometric_to_factor():
    Y = space(("u", "v", "w"), {("u", "v"): F(1, 3), ("u", "w"): F(1, 2), ("v", "w"): F(1, 2)})
    P = sum_product(FinMetricSpace(("o",), [[0]]), Y)
    assert find_isometry(P, Y) is not None


def test_product_distances_truncate():
    X = space(("a", "b"), {("a", "b"): F(3, 4)})
    Y = space(("u", "v"), {("u", "v"): F(3, 4)})
    P = sum_product(X, Y)
    assert P.d(("a", "u"), ("b", "u")) == F(3, 4)
    assert P.d(("a", "u"), ("a", "v")) == F(3, 4)
    assert P.d(("a", "u"), ("b", "v")) == 1


def test_hausdorff_examples():
    Z2 = space(("a", "b"), {("a", "b"): F(1, 2)})
    assert hausdorff_distance(Z2, ["a"], ["a"]) == 0
    assert hausdorff_distance(Z2, ["a"], ["b"]) == F(1, 2)
    Z3 = space(("a", "b", "c"), {("a", "b"): F(1, 4), ("a", "c"): F(1, 2), ("b", "c"): F(1, 2)})
    # directed distances: a -> {b,c} is 1/4, {b,c} -> a is 1/2
    assert hausdorff_distance(Z3, ["a"], ["b", "c"]) == F(1, 2)


def test_hausdorff_of_empty_set_is_an_error():
    Z = FinMetricSpace(("a",), [[0]])
    with pytest.raises(PreconditionError):
        hausdorff_distance(Z, [], ["a"])


@given(metric_spaces(max_points=5), st.data())
def test_hausdorff_is_a_metric_on_subsets(Z, data):
    pts = list(Z.points)
    subsets = [list(c) for r in range(1, len(pts) + 1) for c in itertools.combinations(pts, r)]
    A, B, C = (data.draw(st.sampled_from(subsets)) for _ in range(3))
    dH = lambda P, Q: hausdorff_distance(Z, P, Q)  # noqa: E731
    assert dH(A, B) == dH(B, A)
    assert dH(A, C) <= dH(A, B) + dH(B, C)
    assert (dH(A, B) == 0) == (set(A) == set(B))


def test_self_isometry_with_empty_seed():
    X = space(("a", "b", "c"), {("a", "b"): F(1, 4), ("a", "c"): F(1, 2), ("b", "c"): F(1, 3)})
    assert find_isometry(X, X) == {p: p for p in X.points}


def test_different_distance_multisets_are_not_isometric():
    X = space(("a", "b", "c"), {("a", "b"): F(1, 2), ("a", "c"): F(1, 2), ("b", "c"): 1})
    Y = space(("x", "y", "z"), {("x", "y"): F(1, 2), ("x", "z"): F(1, 2), ("y", "z"): F(1, 2)})
    assert find_isometry(X, Y) is None


def test_isosceles_has_exactly_two_self_isometries():
    X = space(("a", "b", "c"), {("a", "b"): F(1, 2), ("a", "c"): F(1, 2), ("b", "c"): 1})
    found = list(iter_isometries(X, X))
    # oracle: all 6 bijections filtered for isometry
    brute = [
        dict(zip(X.points, perm))
        for perm in itertools.permutations(X.points)
        if check_partial_isometry(X, X, dict(zip(X.points, perm)))
    ]
    assert len(found) == len(brute) == 2
    assert sorted(map(sorted, (f.items() for f in found))) == sorted(map(sorted, (f.items() for f in brute)))


@given(metric_spaces(max_points=5, q=2))
def test_back_and_forth_matches_brute_force(X):
    Y = FinMetricSpace(tuple(reversed(X.points)), [list(reversed(r)) for r in reversed(X.dist)])
    fast = list(iter_isometries(X, Y))
    slow = brute_force_isometries(X, Y)
    key = lambda f: tuple(sorted(f.items()))  # noqa: E731
    assert sorted(map(key, fast)) == sorted(map(key, slow))
    assert all(check_partial_isometry(X, Y, f) for f in fast)


@given(metric_spaces(max_points=5, q=2), st.data())
def test_seeded_search_extends_seed(X, data):
    p = data.draw(st.sampled_from(X.points))
    for f in iter_isometries(X, X, {p: p}):
        assert f[p] == p


def test_bad_seed_is_rejected():
    X = space(("a", "b"), {("a", "b"): F(1, 2)})
    Y = space(("x", "y"), {("x", "y"): F(1, 3)})
    with pytest.raises(PreconditionError):
        find_isometry(X, Y, {"a": "x", "b": "y"})


def test_json_round_trip():
    X = space(("a", "b"), {("a", "b"): F(2, 3)})
    assert FinMetricSpace.from_json(X.to_json()) == X
