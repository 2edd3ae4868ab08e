from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from liftcodes.codes import (
    BY_DEGREES,
    BY_RESTRICTION,
    BaseCode,
    LiftedCode,
    base_from_degrees,
    base_parity_multivariate,
    base_parity_univariate,
    base_reed_solomon,
    construct,
    enumerate_span,
)
from liftcodes.degrees import DegreeSet
from liftcodes.errors import GuardError, ParameterError, UsageError
from liftcodes.gf import field_for, rank
from liftcodes.space import FuncTable


def test_lifted_parity_small():
    L = LiftedCode(base_parity_univariate(4), 2)
    assert L.dimension == 7
    words = L.codewords()
    assert words.shape == (128, 16)
    assert len({w.tobytes() for w in words}) == 128
    assert np.all(L.contains(words, BY_DEGREES))
    assert np.all(L.contains(words, BY_RESTRICTION))


@pytest.mark.parametrize("base,m", [
    (base_parity_univariate(4), 3),
    (base_parity_univariate(8), 2),
    (base_parity_univariate(9, 3), 2),
    (base_reed_solomon(8, 3), 2),
    (base_parity_multivariate(4, 2), 3),
    (base_from_degrees(16, 4, [0, 1, 4]), 2),
])
def test_basis_has_full_rank_and_lies_in_code(base, m):
    L = LiftedCode(base, m)
    B = L.basis()
    assert B.shape == (L.dimension, L.length)
    assert rank(L.ctx, B) == L.dimension  # F_Q-rank of an F_q basis also equals its F_q-rank
    assert np.all(L.contains(B, BY_DEGREES))
    assert np.all(L.contains(B[:4], BY_RESTRICTION))


def test_encode_is_linear_and_in_code():
    L = LiftedCode(base_parity_univariate(8), 2)
    rng = np.random.default_rng(0)
    a, b = L.random_message(rng), L.random_message(rng)
    fa, fb = L.encode(a), L.encode(b)
    total = L.encode([int(L.ctx.add(x, y)) for x, y in zip(a, b)])
    assert total == fa + fb
    assert L.member(fa) and L.member(fa, BY_RESTRICTION)


def test_encode_rejects_coefficients_outside_orbit_field():
    L = LiftedCode(base_parity_univariate(4), 2)
    fields = L.message_fields()
    msg = [0] * len(fields)
    slot = next(i for i, (_, order) in enumerate(fields) if order == 2)
    msg[slot] = 2  # 2 = x is not in F_2
    with pytest.raises(UsageError):
        L.encode(msg)
    with pytest.raises(UsageError):
        L.encode([0])


def test_membership_respects_value_field():
    L = LiftedCode(base_parity_univariate(4), 2)
    f = np.zeros(16, dtype=np.int64)
    f[0] = 2
    assert not L.contains(f)


def test_base_code_validation():
    with pytest.raises(UsageError):
        BaseCode(field_for(8, 2), 1, 2, DegreeSet.univariate(8, 2, [0, 1]))
    with pytest.raises(UsageError):
        base_reed_solomon(8, 7)
    with pytest.raises(UsageError):
        LiftedCode(base_parity_multivariate(4, 2), 1)


def test_punctured_solver_recovers_codewords():
    base = base_reed_solomon(8, 3)
    solver = base.punctured_solver()
    L = base.as_lift()
    rng = np.random.default_rng(5)
    for _ in range(20):
        g = L.random_codeword(rng).values
        assert np.array_equal(solver.solve(g[1:]), g)
    h = rng.integers(0, 8, size=7)
    out = solver.solve(h)
    assert out is None or np.array_equal(out[1:], h)


def test_enumerate_span_guard():
    L = LiftedCode(base_parity_univariate(8), 2)
    with pytest.raises(GuardError):
        enumerate_span(L.ctx, L.basis(), 2, limit=1 << 10)


def test_theorem_one_parameters():
    params, code = construct(1, k=4, m=5)
    assert (params.Q, params.N, params.locality) == (4, 1024, 3)
    assert params.dim_bound == math.comb(5, 2)
    assert code.dimension >= params.dim_bound
    with pytest.raises(ParameterError):
        construct(1, k=6, m=2)


def test_theorem_two_parameters():
    params, code = construct(2, eps=0.5, N0=256)
    assert (params.m, params.Q, params.N) == (2, 16, 256)
    assert params.b == 2
    assert code.dimension >= params.dim_bound


def test_theorem_three_parameters():
    params, code = construct(3, eps=0.25, m=3)
    assert (params.ell, params.Q, params.t, params.N) == (2, 4, 2, 64)
    assert code.dimension == params.dim_exact == 48


def test_theorem_four_parameters():
    params, code = construct(4, c=2, s=4, m=2)
    assert (params.Q, params.d, params.gamma, params.tau) == (16, 12, Fraction(1, 4), Fraction(1, 24))
    assert params.dim_bound == 80
    assert code.dimension == 109
    with pytest.raises(ParameterError, match="c <= s"):
        construct(4, c=7, s=6, m=2)
    with pytest.raises(ParameterError, match="c < s"):
        construct(4, c=4, s=4, m=2)
    with pytest.raises(UsageError):
        construct(5)


def test_params_serialize():
    params, _ = construct(4, c=2, s=4, m=2)
    d = params.to_dict()
    assert d["gamma"] == {"num": 1, "den": 4, "value": 0.25}


def test_random_codeword_is_member():
    L = LiftedCode(base_reed_solomon(16, 12), 2)
    f = L.random_codeword(np.random.default_rng(3))
    assert isinstance(f, FuncTable) and L.member(f)


@pytest.mark.parametrize("Q,q", [(2, 2), (4, 2), (8, 2), (3, 3), (4, 4), (5, 5)])
def test_degree_membership_agrees_with_parity_checker_exhaustively(Q, q):
    base = base_parity_univariate(Q, q)
    ctx = base.ctx
    elems = ctx.subfield_elements(q)
    idx = np.arange(q**Q)
    digits = (idx[:, None] // q ** np.arange(Q)[None, :]) % q
    F = elems[digits]
    assert np.array_equal(base.contains_by_degrees(F), base.contains(F))
    assert int(np.count_nonzero(base.contains(F))) == q ** base.dimension


def test_multivariate_parity_base():
    base = base_parity_multivariate(4, 2)
    assert base.dimension == 15
    rng = np.random.default_rng(8)
    F = rng.integers(0, 2, size=(1000, 16))
    F[:500] = LiftedCode(base, 2).codewords(limit=1 << 16)[rng.integers(0, 1 << 15, size=500)]
    assert np.array_equal(base.contains_by_degrees(F), base.contains(F))


def test_single_orbit_encoding():
    L = LiftedCode(base_from_degrees(4, 2, [1, 2]), 1)
    assert L.message_fields() == [((1,), 4)]
    assert L.encode([1]).values.tolist() == [0, 0, 1, 1]  # Tr(x)
    assert L.encode([2]).values.tolist() == [0, 1, 1, 0]  # Tr(w x), w = 2
    assert L.encode([0]).weight() == 0


def test_encode_is_injective_exhaustively():
    L = LiftedCode(base_parity_univariate(4), 2)
    fields = L.message_fields()
    choices = [L.ctx.subfield_elements(order).tolist() for _, order in fields]
    tables = {L.encode(list(msg)).values.tobytes() for msg in itertools.product(*choices)}
    assert len(tables) == 2**L.dimension == 128


@pytest.mark.parametrize("base,m", [(base_parity_univariate(8), 2), (base_parity_multivariate(4, 2), 3)])
def test_modes_agree_on_random_functions(base, m):
    L = LiftedCode(base, m)
    rng = np.random.default_rng(10)
    for _ in range(10):
        F = rng.integers(0, 2, size=(1000, L.length))
        assert np.array_equal(L.contains(F, BY_DEGREES), L.contains(F, BY_RESTRICTION))


def test_invertible_affine_maps_preserve_code():
    from liftcodes.analysis import all_affine_image_indices
    from liftcodes.gf import rank as field_rank

    L = LiftedCode(base_parity_univariate(4), 2)
    words = L.codewords()
    images = all_affine_image_indices(L.ctx, 2)
    invertible = 0
    for r, flat in enumerate(itertools.product(range(4), repeat=4)):
        if field_rank(L.ctx, np.array(flat).reshape(2, 2)) == 2:
            invertible += 16
            for shift in range(16):
                assert np.all(L.contains(words[:, images[r * 16 + shift]]))
    assert invertible == 16 * 180
