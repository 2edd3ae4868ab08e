from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from liftcodes.errors import UsageError
from liftcodes.gf import field_for
from liftcodes.space import (
    AffineMap,
    AffineSubspace,
    FuncTable,
    coefficient_array,
    coefficients,
    compose_affine,
    count_subspaces,
    count_subspaces_through_point,
    domain_points,
    enumerate_subspaces,
    evaluate_poly,
    evaluation_array,
    monomial_trace_function,
    point_coords,
    point_index,
    random_subspace_through,
    restrict,
    subspace_index_matrix,
)

SMALL = [(2, 2, 3), (3, 3, 2), (4, 2, 2), (5, 5, 2), (8, 2, 2), (9, 3, 2)]


def _naive_eval(ctx, coeffs, x):
    acc = 0
    for d, c in coeffs.items():
        term = c
        for xi, e in zip(x, d):
            term = ctx.mul(term, ctx.pow(xi, e))
        acc = ctx.add(acc, term)
    return int(acc)


@given(st.sampled_from(SMALL), st.data())
def test_evaluation_matches_naive_sum(params, data):
    Q, q, m = params
    ctx = field_for(Q, q)
    degs = data.draw(st.lists(st.tuples(*[st.integers(0, Q - 1)] * m), max_size=5, unique=True))
    coeffs = {d: data.draw(st.integers(1, Q - 1)) for d in degs}
    f = evaluate_poly(coeffs, ctx, m)
    for idx in data.draw(st.lists(st.integers(0, Q**m - 1), min_size=1, max_size=8)):
        x = point_coords(ctx, m, idx)
        assert f(*x) == _naive_eval(ctx, coeffs, x)
    assert coefficients(f) == coeffs


@pytest.mark.parametrize("Q,q,m", SMALL)
def test_interpolation_round_trip(Q, q, m):
    ctx = field_for(Q, q)
    rng = np.random.default_rng(Q * 10 + m)
    vals = rng.integers(0, Q, size=(3, Q**m))
    coef = coefficient_array(ctx, m, vals)
    assert np.array_equal(evaluation_array(ctx, m, coef), vals)


def test_indicator_of_zero_in_f4():
    ctx = field_for(4, 2)
    f = FuncTable(ctx, 1, [1, 0, 0, 0], 4)
    assert coefficients(f) == {(0,): 1, (3,): 1}


def test_trace_function_table():
    ctx = field_for(4, 2)
    f = monomial_trace_function(ctx, 1, 1)
    assert f.values.tolist() == [0, 0, 1, 1]


def test_point_indexing():
    ctx = field_for(4)
    pts = domain_points(ctx, 3)
    assert pts.shape == (64, 3)
    assert point_index(ctx, pts).tolist() == list(range(64))
    assert point_index(ctx, (1, 2, 3)) == 16 + 8 + 3


def test_functable_checks_and_serialization():
    ctx = field_for(8, 2)
    with pytest.raises(UsageError):
        FuncTable(ctx, 1, [0, 1, 2, 0, 0, 0, 0, 0])  # 2 is not in F_2
    f = FuncTable(ctx, 1, [0, 1, 1, 0, 0, 0, 1, 1])
    assert FuncTable.from_dict(f.to_dict()) == f
    assert f.weight() == 4
    assert f.distance(FuncTable.zeros(ctx, 1)) == 0.5


@pytest.mark.parametrize("Q,m,t", [(2, 3, 1), (3, 2, 1), (4, 2, 1), (4, 3, 2), (2, 3, 2), (3, 3, 2)])
def test_subspace_enumeration_is_complete_and_distinct(Q, m, t):
    ctx = field_for(Q, Q)
    rows = subspace_index_matrix(ctx, m, t)
    assert rows.shape[0] == count_subspaces(Q, m, t)
    assert len({frozenset(r.tolist()) for r in rows}) == rows.shape[0]
    per_point = np.bincount(rows.reshape(-1), minlength=Q**m)
    assert set(per_point.tolist()) == {count_subspaces_through_point(Q, m, t)}


def test_line_and_plane_counts():
    assert count_subspaces(4, 2, 1) == 20
    assert count_subspaces(4, 3, 2) == 84
    assert count_subspaces_through_point(4, 2, 1) == 5


def test_subspace_rejects_dependent_basis():
    ctx = field_for(4)
    with pytest.raises(UsageError):
        AffineSubspace(ctx, (0, 0), [(1, 2), (2, 3)])  # 2 * (1, 2) = (2, 3) in F_4


def test_random_subspace_contains_point():
    ctx = field_for(8)
    rng = np.random.default_rng(1)
    for _ in range(20):
        V = random_subspace_through(ctx, (3, 5, 7), 2, rng)
        assert tuple(V.coords()[0]) == (3, 5, 7)
        assert len(set(V.indices().tolist())) == 64


def test_restrict_and_compose():
    ctx = field_for(4)
    f = evaluate_poly({(1, 1): 1}, ctx, 2)  # x*y
    V = AffineSubspace(ctx, (0, 1), [(1, 0)])  # the line y = 1
    assert np.array_equal(restrict(f, V).values, np.arange(4))
    proj = AffineMap(ctx, [[1, 0], [0, 0]])
    assert not proj.invertible
    g = compose_affine(f, proj)
    assert g.weight() == 0  # x * 0
    ident = AffineMap.identity(ctx, 2)
    assert compose_affine(f, ident) == f


def test_image_subspace():
    ctx = field_for(4)
    A = AffineMap(ctx, [[0, 1], [1, 0]], (1, 0))
    V = AffineSubspace(ctx, (0, 0), [(1, 0)])
    W = A.image_subspace(V)
    assert set(W.indices().tolist()) == set(A.apply(V.coords()).dot([4, 1]).tolist())
    with pytest.raises(UsageError):
        AffineMap(ctx, [[1, 0], [0, 0]]).image_subspace(V)


def test_enumerated_subspaces_are_affine_sets():
    ctx = field_for(3)
    for V in itertools.islice(enumerate_subspaces(ctx, 2, 1), 12):
        pts = V.coords()
        # an affine line over F_3: x0 + x1 + x2 = 3 * midpoint = 0 coordinatewise
        assert np.all(ctx.sum(pts, axis=0) == 0)
