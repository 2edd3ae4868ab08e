from __future__ import annotations

import pickle

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from liftcodes.errors import UsageError
from liftcodes.gf import IRREDUCIBLES, FieldCtx, FieldElement, field_for, get_field, is_irreducible, rank, rref, solve

FIELDS = [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (5, 1), (5, 2), (2, 8), (3, 3)]


def _ctx(pk):
    p, k = pk
    return get_field(p, 1, k)


@pytest.mark.parametrize("pk", FIELDS)
def test_multiplicative_group_is_cyclic(pk):
    ctx = _ctx(pk)
    g = ctx.primitive
    seen = {int(ctx.pow(g, i)) for i in range(ctx.Q - 1)}
    assert seen == set(range(1, ctx.Q))


@pytest.mark.parametrize("pk", [k for k in IRREDUCIBLES if k[0] ** k[1] <= 3**6])
def test_table_polynomials_are_irreducible(pk):
    assert is_irreducible(IRREDUCIBLES[pk], pk[0])


@given(st.sampled_from(FIELDS), st.data())
def test_field_axioms(pk, data):
    ctx = _ctx(pk)
    el = st.integers(0, ctx.Q - 1)
    a, b, c = data.draw(el), data.draw(el), data.draw(el)
    assert ctx.add(a, b) == ctx.add(b, a)
    assert ctx.mul(a, b) == ctx.mul(b, a)
    assert ctx.mul(a, ctx.add(b, c)) == ctx.add(ctx.mul(a, b), ctx.mul(a, c))
    assert ctx.add(ctx.add(a, b), c) == ctx.add(a, ctx.add(b, c))
    assert ctx.mul(ctx.mul(a, b), c) == ctx.mul(a, ctx.mul(b, c))
    assert ctx.sub(ctx.add(a, b), b) == a
    if a:
        assert ctx.mul(a, ctx.inv(a)) == 1
        assert ctx.div(ctx.mul(a, b), a) == b
    assert ctx.pow(a, ctx.Q) == a  # Frobenius fixes the whole field


def test_f4_values():
    ctx = field_for(4, 2)
    w = 2  # the class of x
    assert ctx.mul(w, w) == 3  # x^2 = x + 1
    assert ctx.trace(w) == 1
    assert ctx.trace(1) == 0
    assert ctx.trace(np.arange(4)).tolist() == [0, 0, 1, 1]


def test_zero_has_no_inverse_and_zero_power():
    ctx = field_for(8)
    with pytest.raises(ZeroDivisionError):
        ctx.inv(0)
    assert ctx.pow(0, 0) == 1


@pytest.mark.parametrize("Q,q", [(4, 2), (8, 2), (16, 4), (9, 3), (16, 2), (27, 3)])
def test_trace_lands_in_subfield_and_is_onto(Q, q):
    ctx = field_for(Q, q)
    tr = ctx.trace(np.arange(Q))
    assert set(tr.tolist()) == set(ctx.subfield_elements(q).tolist())
    # F_q-linear: Tr(c x) = c Tr(x)
    for c in ctx.subfield_elements(q):
        assert np.array_equal(ctx.trace(ctx.mul(int(c), np.arange(Q))), ctx.mul(int(c), tr))


def test_subfields():
    ctx = field_for(16, 4)
    assert ctx.subfield_elements(4).size == 4
    assert ctx.subfield_elements(2).tolist() == [0, 1]
    assert all(ctx.is_in_subfield(ctx.subfield_elements(4), 4))
    with pytest.raises(UsageError):
        ctx.subfield_elements(8)


def test_orbit_trace_generalizes_trace():
    ctx = field_for(16, 2)
    xs = np.arange(16)
    assert np.array_equal(ctx.orbit_trace(xs, 2, 4), ctx.trace(xs, 2))


def test_serialization_and_pickle():
    ctx = field_for(9, 3)
    for x in range(9):
        assert ctx.deserialize(ctx.serialize(x)) == x
    assert pickle.loads(pickle.dumps(ctx)) == ctx


def test_unsupported_prime_is_rejected():
    with pytest.raises(UsageError):
        get_field(7)


def test_from_spec():
    ctx = FieldCtx.from_spec("2^4", 4)
    assert (ctx.Q, ctx.q) == (16, 4)


def test_field_element_operators():
    ctx = field_for(8)
    a, b = FieldElement(ctx, 3), FieldElement(ctx, 5)
    assert int((a * b) / b) == 3
    assert int(a + a) == 0
    other = FieldElement(field_for(4), 1)
    with pytest.raises(UsageError):
        _ = a + other


def test_linear_algebra():
    ctx = field_for(5)
    A = np.array([[1, 2, 3], [2, 4, 0], [0, 0, 0]])
    R, piv = rref(ctx, A)
    assert piv == [0, 2]
    assert rank(ctx, A) == 2
    x = solve(ctx, A, np.array([1, 2, 0]))
    assert x is not None
    assert np.array_equal(ctx.dot(A, x[None, :]), np.array([1, 2, 0]))
    assert solve(ctx, A, np.array([0, 0, 1])) is None


@pytest.mark.parametrize("Q", [4, 8, 9, 16, 25, 27, 32, 64])
def test_frobenius_is_additive_exhaustively(Q):
    ctx = field_for(Q)
    a, b = np.meshgrid(np.arange(Q), np.arange(Q), indexing="ij")
    assert np.array_equal(ctx.pow(ctx.add(a, b), ctx.p), ctx.add(ctx.pow(a, ctx.p), ctx.pow(b, ctx.p)))
