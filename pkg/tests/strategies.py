"""Hypothesis strategies for exact grey data."""

import itertools
from fractions import Fraction

from hypothesis import strategies as st

from topogrey.finmetric import FinMetricSpace
from topogrey.generators import floyd_warshall
from topogrey.greycore import GreyRelation, GreySet

MAX_DEN = 8


@st.composite
def unit_fractions(draw, max_den: int = MAX_DEN) -> Fraction:
    q = draw(st.integers(1, max_den))
    return Fraction(draw(st.integers(0, q)), q)


def carriers(max_size: int = 4):
    return st.integers(1, max_size).map(lambda n: tuple("abcdef"[:n]))


@st.composite
def greysets(draw, carrier=None, max_size: int = 4) -> GreySet:
    carrier = carrier if carrier is not None else draw(carriers(max_size))
    return GreySet(carrier, {x: draw(unit_fractions()) for x in carrier})


@st.composite
def relations(draw, source, target) -> GreyRelation:
    return GreyRelation.from_function(source, target, lambda a, b: draw(unit_fractions()))


def _closed_weights(draw, n: int, lo: int, q: int):
    w = [[Fraction(0)] * n for _ in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        w[i][j] = w[j][i] = Fraction(draw(st.integers(lo, q)), q)
    return floyd_warshall(range(n), w)


@st.composite
def pseudometrics(draw, carrier) -> GreyRelation:
    q = draw(st.integers(1, MAX_DEN))
    d = _closed_weights(draw, len(carrier), 0, q)
    idx = {x: i for i, x in enumerate(carrier)}
    return GreyRelation.from_function(carrier, carrier, lambda a, b: d[idx[a]][idx[b]])


@st.composite
def metric_spaces(draw, max_points: int = 5, q=None, names: str = "abcdefgh") -> FinMetricSpace:
    n = draw(st.integers(1, max_points))
    q = q if q is not None else draw(st.integers(1, 4))
    return FinMetricSpace(tuple(names[:n]), _closed_weights(draw, n, 1, q))
