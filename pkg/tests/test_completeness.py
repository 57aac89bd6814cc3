import math

from hypothesis import given, settings, strategies as st

from bethekit import (ModelSpec, Sector, SolverConfig, classify, completeness_report,
                      singular_vector_count, solve, weight_subspace_dim)
from bethekit.completeness import expected_count

from _instances import six_vertex

spins = st.lists(st.integers(1, 4), min_size=1, max_size=5)


def test_weight_subspace_dim_examples():
    assert weight_subspace_dim((3, 1, 2), 0) == 1
    assert weight_subspace_dim((1, 1), 1) == 2
    assert weight_subspace_dim((2, 1, 1), 2) == 4
    assert weight_subspace_dim((1, 1), 3) == 0
    assert weight_subspace_dim((1, 1), -1) == 0


def test_singular_vector_count_examples():
    assert singular_vector_count((1, 1), 0) == 1
    assert singular_vector_count((1, 1), 1) == 1
    assert singular_vector_count((1, 1), 2) == 0
    # three spin-1/2: 1/2 x 1/2 x 1/2 = 3/2 + 2 x 1/2
    assert singular_vector_count((1, 1, 1), 1) == 2


def _report(spec, k):
    sec = Sector.of(spec, k)
    out = solve(spec, sec, SolverConfig(expected_count=expected_count(spec, sec)[0]))
    classes = [classify(spec, sec, rs, out.classify_tol(j, 1e-7))
               for j, rs in enumerate(out.solutions)]
    return completeness_report(spec, sec, out, classes)


def test_report_examples():
    z = (0.2 - 0.5j, 1.3 + 0.4j)
    rep = _report(ModelSpec.xxx((1, 1), z, mu=0.6 + 1.3j), 1)
    assert rep.expected == 2 and rep.match and not rep.conjectural
    rep = _report(ModelSpec.xxx((1, 1), z), 1)
    assert rep.expected == 1 and rep.match
    rep = _report(six_vertex(2), 1)
    assert rep.expected == 2 and rep.match and rep.conjectural
    d = rep.to_dict()
    assert d["match"] and d["found_total"] == 2


@settings(max_examples=200, deadline=None)
@given(spins)
def test_dimensions_sum_to_total(two_ell):
    total = sum(weight_subspace_dim(two_ell, k) for k in range(sum(two_ell) + 1))
    assert total == math.prod(n + 1 for n in two_ell)


@settings(max_examples=200, deadline=None)
@given(spins, st.integers(0, 20))
def test_palindromy(two_ell, k):
    assert weight_subspace_dim(two_ell, k) == weight_subspace_dim(two_ell, sum(two_ell) - k)


@settings(max_examples=200, deadline=None)
@given(spins)
def test_clebsch_gordan(two_ell):
    s = sum(two_ell)
    total = sum(singular_vector_count(two_ell, k) * (s - 2 * k + 1) for k in range(s // 2 + 1))
    assert total == math.prod(n + 1 for n in two_ell)
